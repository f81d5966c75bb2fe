#include "flexgate/plant/traces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace flexgate::plant {

Result<std::vector<TracePoint>, IngestError> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return IngestError{1, "empty input"};
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_s,value") return IngestError{1, "expected header 't_s,value'"};

    std::vector<TracePoint> points;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) return IngestError{lineno, "missing comma"};
        try {
            std::size_t used = 0;
            double t = std::stod(line.substr(0, comma), &used);
            if (used != comma) return IngestError{lineno, "bad time value"};
            std::string vs = line.substr(comma + 1);
            double v = std::stod(vs, &used);
            if (used != vs.size()) return IngestError{lineno, "bad value"};
            if (!points.empty() && t <= points.back().t_s) {
                return IngestError{lineno, "time not increasing"};
            }
            points.push_back({t, v});
        } catch (const std::exception&) {
            return IngestError{lineno, "bad number"};
        }
    }
    if (points.empty()) return IngestError{lineno, "no data rows"};
    return points;
}

Result<std::vector<TracePoint>, IngestError> read_trace_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) return IngestError{0, "cannot open " + path};
    return read_trace_csv(f);
}

SeriesSampler::SeriesSampler(std::vector<TracePoint> points) : points_(std::move(points)) {}

double SeriesSampler::at(double t_s) const {
    if (points_.empty()) return 0;
    auto it = std::upper_bound(points_.begin(), points_.end(), t_s,
                               [](double t, const TracePoint& p) { return t < p.t_s; });
    if (it == points_.begin()) return points_.front().value;
    return std::prev(it)->value;
}

WeatherSample clearsky_at(double t_s, const ClearSkyParams& p) {
    double t = t_s;
    if (p.hold_s > 0) t = std::floor(t / p.hold_s) * p.hold_s;
    double day = 86400.0;
    double tod = t - std::floor(t / day) * day;
    double irr = 0;
    if (tod > p.sunrise_s && tod < p.sunset_s && p.sunset_s > p.sunrise_s) {
        double x = std::sin(M_PI * (tod - p.sunrise_s) / (p.sunset_s - p.sunrise_s));
        irr = p.g_max_wm2 * std::pow(std::max(0.0, x), p.shape_exp);
    }
    return WeatherSample{irr, p.ambient_c + p.heating_c_per_wm2 * irr};
}

double load_at(double t_s, const LoadParams& p) {
    double w = p.base_w;
    for (const auto& e : p.events) {
        if (t_s >= e.start_s && t_s < e.start_s + e.duration_s) w += e.watts;
    }
    return w;
}

std::vector<double> load_series(double t0_s, std::size_t steps, double dt_s,
                                const LoadParams& p) {
    std::vector<double> out(steps);
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> dist(-p.jitter_w, p.jitter_w);
    for (std::size_t k = 0; k < steps; ++k) {
        double w = load_at(t0_s + static_cast<double>(k) * dt_s, p);
        if (p.jitter_w > 0) w = std::max(0.0, w + dist(rng));
        out[k] = w;
    }
    return out;
}

}  // namespace flexgate::plant
