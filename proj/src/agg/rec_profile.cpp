#include "flexgate/agg/rec_profile.hpp"

#include <cmath>
#include <fstream>

#include "flexgate/plant/plant.hpp"

namespace flexgate::agg {

RecProfile rec_profile_synth(const RecSynthParams& p, double duration_s, double interval_s) {
    RecProfile out;
    out.interval_s = interval_s;
    auto intervals = static_cast<std::size_t>(std::ceil(duration_s / interval_s));
    plant::PlantConfig pv_cfg;
    pv_cfg.pv_peak_w = p.pv_peak_per_house_w;

    const double sample_dt = 15.0;
    double pv_houses = p.n_houses * p.pv_fraction;
    double base_total = p.n_houses * p.base_load_per_house_w;
    for (std::size_t k = 0; k < intervals; ++k) {
        double t0 = static_cast<double>(k) * interval_s;
        double acc = 0;
        std::size_t samples = 0;
        for (double t = t0; t < t0 + interval_s; t += sample_dt) {
            auto w = plant::clearsky_at(t, p.day);
            acc += plant::pv_mppt_power(w.irr_wm2, w.pnl_tmp_c, pv_cfg);
            ++samples;
        }
        double pv_mean = samples ? acc / static_cast<double>(samples) : 0.0;
        out.p_rec_w.push_back(pv_houses * pv_mean - base_total);
    }
    return out;
}

Result<RecProfile, plant::IngestError> rec_profile_from_csv(const std::string& path,
                                                            double interval_s) {
    std::ifstream f(path);
    if (!f) return plant::IngestError{0, "cannot open " + path};

    std::string line;
    if (!std::getline(f, line)) return plant::IngestError{1, "empty input"};
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "interval_idx,p_rec_w") {
        return plant::IngestError{1, "expected header 'interval_idx,p_rec_w'"};
    }

    RecProfile out;
    out.interval_s = interval_s;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) return plant::IngestError{lineno, "missing comma"};
        try {
            std::size_t used = 0;
            std::string is = line.substr(0, comma);
            long idx = std::stol(is, &used);
            if (used != is.size()) return plant::IngestError{lineno, "bad interval index"};
            std::string vs = line.substr(comma + 1);
            double v = std::stod(vs, &used);
            if (used != vs.size()) return plant::IngestError{lineno, "bad value"};
            if (idx != static_cast<long>(out.p_rec_w.size())) {
                return plant::IngestError{lineno, "interval indices must run 0..N-1"};
            }
            out.p_rec_w.push_back(v);
        } catch (const std::exception&) {
            return plant::IngestError{lineno, "bad number"};
        }
    }
    if (out.p_rec_w.empty()) return plant::IngestError{lineno, "no data rows"};
    return out;
}

}  // namespace flexgate::agg
