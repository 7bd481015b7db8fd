#include "synchrocal/campaign.hpp"
#include "synchrocal/config_file.hpp"
#include "synchrocal/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace synchrocal {

namespace {

using Json = nlohmann::ordered_json;

int label_rank(const std::string& label)
{
    static constexpr std::array<std::string_view, 5> kOrder{"PM", "AM", "FR-U", "FR-D", "STEADY"};
    const auto it = std::find(kOrder.begin(), kOrder.end(), label);
    return static_cast<int>(it - kOrder.begin());
}

std::string cell(double v)
{
    return std::isfinite(v) ? format_double(v) : "NA";
}

std::string fixed(double v, int digits = 2)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string short_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

Json number(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json to_json(const NormalityResult& r)
{
    Json j;
    j["test"] = std::string(to_string(r.test));
    j["statistic"] = number(r.statistic);
    j["p_value"] = number(r.p_value);
    j["alpha"] = r.alpha;
    j["reject"] = r.reject;
    j["n_used"] = r.n_used;
    j["p_value_method"] = r.p_value_method;
    j["note"] = r.note;
    Json subs = Json::array();
    for (const auto& s : r.subsamples)
        subs.push_back(Json{{"seed", s.seed}, {"statistic", number(s.statistic)}, {"p_value", number(s.p_value)}});
    j["subsamples"] = std::move(subs);
    return j;
}

Json to_json(const GmmModel& m)
{
    Json j;
    j["k"] = m.k;
    Json comps = Json::array();
    for (const auto& c : m.components)
        comps.push_back(Json{{"weight", c.weight}, {"mean", c.mean}, {"std_dev", c.std_dev}});
    j["components"] = std::move(comps);
    j["log_likelihood"] = number(m.log_likelihood);
    j["bic"] = number(m.bic);
    j["iterations"] = m.iterations;
    j["converged"] = m.converged;
    Json bics = Json::array();
    for (double b : m.candidate_bic)
        bics.push_back(number(b));
    j["candidate_bic"] = std::move(bics);
    return j;
}

Json to_json(const ChannelReport& c)
{
    Json j;
    j["channel"] = std::string(to_string(c.channel));
    j["n"] = c.n;
    if (c.moments) {
        const auto& m = *c.moments;
        j["moments"] = Json{{"n", m.n},
                            {"mean", number(m.mean)},
                            {"median", number(m.median)},
                            {"std_dev", number(m.std_dev)},
                            {"skewness", number(m.skewness)},
                            {"excess_kurtosis", number(m.excess_kurtosis)},
                            {"shape_defined", m.shape_defined}};
    } else {
        j["moments"] = nullptr;
    }
    j["shapiro_wilk"] = c.shapiro_wilk ? to_json(*c.shapiro_wilk) : Json(nullptr);
    j["ks_gaussian"] = c.ks_gaussian ? to_json(*c.ks_gaussian) : Json(nullptr);
    j["gmm"] = c.gmm ? to_json(*c.gmm) : Json(nullptr);
    if (c.histogram) {
        Json edges = Json::array();
        for (double e : c.histogram->bin_edges)
            edges.push_back(e);
        j["histogram"] = Json{{"bin_edges", std::move(edges)},
                              {"counts", c.histogram->counts},
                              {"n_total", c.histogram->n_total},
                              {"modes", c.histogram->count_modes()}};
    } else {
        j["histogram"] = nullptr;
    }
    j["notes"] = c.notes;
    return j;
}

Json to_json(const ConsistencyResult& r)
{
    Json pairs = Json::array();
    for (const auto& p : r.pairs)
        pairs.push_back(Json{{"run_a", p.run_a},
                             {"run_b", p.run_b},
                             {"ks_statistic", number(p.ks_statistic)},
                             {"p_value", number(p.p_value)},
                             {"range_overlap", number(p.range_overlap)},
                             {"pass", p.pass}});
    return Json{{"pass", r.pass}, {"pairs", std::move(pairs)}};
}

bool has_plot(const ChannelReport& c)
{
    return c.histogram && c.histogram->n_total > 0;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << content;
    if (!out.flush())
        throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::string channel_slug(ErrorChannel c)
{
    return c == ErrorChannel::RME ? "rme" : "pe";
}

} // namespace

std::string summary_csv(std::span<const CampaignReport> reports)
{
    std::vector<const CampaignReport*> order;
    for (const auto& r : reports)
        order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](const CampaignReport* a, const CampaignReport* b) {
        const int ra = label_rank(a->test_label), rb = label_rank(b->test_label);
        if (ra != rb)
            return ra < rb;
        return ra == 5 && a->test_label < b->test_label;
    });

    std::string out = "channel,test,Mean,Median,Std. dev.,Skewness,Kurtosis\n";
    for (const ErrorChannel ch : {ErrorChannel::PE, ErrorChannel::RME}) {
        for (const CampaignReport* r : order) {
            const ChannelReport& c = ch == ErrorChannel::PE ? r->pe : r->rme;
            if (!c.moments)
                continue;
            const MomentSummary& m = *c.moments;
            out += std::string(to_string(ch)) + ',' + r->test_label + ',' + cell(m.mean) + ',' + cell(m.median) + ',' +
                   cell(m.std_dev) + ',' + cell(m.skewness) + ',' + cell(m.excess_kurtosis) + '\n';
        }
    }
    return out;
}

std::string histogram_csv(const Histogram& h)
{
    std::string out = "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.bins(); ++i)
        out += format_double(h.bin_edges[i]) + ',' + format_double(h.bin_edges[i + 1]) + ',' +
               std::to_string(h.counts[i]) + '\n';
    return out;
}

std::string histogram_svg(const Histogram& h, const std::string& title, const std::string& x_label)
{
    constexpr double kWidth = 640, kHeight = 400;
    constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         xml_escape(title) + "</text>\n";

    const std::size_t peak = h.counts.empty() ? 0 : *std::max_element(h.counts.begin(), h.counts.end());
    if (h.bins() > 0 && peak > 0) {
        const double lo = h.bin_edges.front(), hi = h.bin_edges.back();
        const double span = hi > lo ? hi - lo : 1.0;
        for (std::size_t i = 0; i < h.bins(); ++i) {
            if (h.counts[i] == 0)
                continue;
            const double x0 = kLeft + (h.bin_edges[i] - lo) / span * plot_w;
            const double x1 = kLeft + (h.bin_edges[i + 1] - lo) / span * plot_w;
            const double bh = static_cast<double>(h.counts[i]) / static_cast<double>(peak) * plot_h;
            s += "<rect x=\"" + fixed(x0) + "\" y=\"" + fixed(kTop + plot_h - bh) + "\" width=\"" +
                 fixed(std::max(x1 - x0, 0.5)) + "\" height=\"" + fixed(bh) + "\" fill=\"steelblue\"/>\n";
        }
        for (int t = 0; t <= 4; ++t) {
            const double x = kLeft + plot_w * t / 4.0;
            s += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(kTop + plot_h + 18) +
                 "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
                 short_number(lo + (hi - lo) * t / 4.0) + "</text>\n";
        }
        s += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(kTop + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(peak) +
             "</text>\n";
    }
    s += "<line x1=\"70\" y1=\"340\" x2=\"620\" y2=\"340\" stroke=\"black\"/>\n";
    s += "<line x1=\"70\" y1=\"40\" x2=\"70\" y2=\"340\" stroke=\"black\"/>\n";
    s += "<text x=\"345\" y=\"385\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         xml_escape(x_label) + "</text>\n";
    s += "<text x=\"18\" y=\"190\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 190)\">count</text>\n";
    s += "</svg>\n";
    return s;
}

std::string report_json(const CampaignReport& report)
{
    Json j;
    j["test"] = report.test_label;
    j["repeats"] = report.repeats;
    j["consistent"] = report.consistent;
    j["channels"] = Json{{"PE", to_json(report.pe)}, {"RME", to_json(report.rme)}};
    j["consistency"] = Json{{"PE", to_json(report.consistency_pe)}, {"RME", to_json(report.consistency_rme)}};
    Json plots = Json::object();
    for (const ChannelReport* c : {&report.pe, &report.rme})
        plots[std::string(to_string(c->channel))] =
            has_plot(*c) ? Json("histogram_" + channel_slug(c->channel) + ".svg") : Json("omitted: empty histogram");
    j["plots"] = std::move(plots);
    j["provenance"] = report.provenance;
    return j.dump(2) + '\n';
}

std::vector<std::filesystem::path> emit_report(const CampaignReport& report, const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(out_dir / name, content);
        written.push_back(out_dir / name);
    };

    emit("summary.csv", summary_csv(std::span(&report, 1)));
    if (report.errors.rme || report.errors.pe)
        emit("errors.csv", write_error_series_csv(report.errors));
    for (const ChannelReport* c : {&report.pe, &report.rme}) {
        if (!has_plot(*c))
            continue;
        const std::string slug = channel_slug(c->channel);
        const std::string unit = c->channel == ErrorChannel::PE ? "PE (deg)" : "RME (%)";
        emit("histogram_" + slug + ".csv", histogram_csv(*c->histogram));
        emit("histogram_" + slug + ".svg",
             histogram_svg(*c->histogram, std::string(to_string(c->channel)) + " histogram, " + report.test_label, unit));
    }
    emit("report.json", report_json(report));
    return written;
}

} // namespace synchrocal
