#include "searchnet/metrics.hpp"

#include <cmath>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "searchnet/error.hpp"
#include "searchnet/kernels.hpp"

namespace searchnet {

DegreeHistogram degree_histogram(const BipartiteGraph& graph, Side side, std::uint32_t d_floor,
                                 std::uint64_t recorded_at) {
    DegreeHistogram h;
    h.side = side;
    h.recorded_at = recorded_at;
    h.d_floor = d_floor;
    const DegreeIndex& index = graph.degree_index(side);
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto d = static_cast<std::uint32_t>(index.mass(i));
        if (d < d_floor) continue;
        ++h.counts[d];
        ++h.total_nodes;
    }
    return h;
}

const char* fit_method_name(FitMethod m) noexcept {
    return m == FitMethod::LogLogRegression ? "LogLogRegression" : "DiscreteMLE";
}

FitMethod parse_fit_method(const std::string& name) {
    if (name == "LogLogRegression" || name == "regression") return FitMethod::LogLogRegression;
    if (name == "DiscreteMLE" || name == "mle") return FitMethod::DiscreteMLE;
    throw ParameterError("unknown fit method: " + name);
}

PowerLawFit fit_power_law(const DegreeHistogram& hist, std::uint32_t d_min, FitMethod method) {
    if (d_min < 1) throw ParameterError("d_min must be >= 1");
    PowerLawFit fit;
    fit.d_min = d_min;
    fit.method = method;

    std::vector<double> degree, count;
    for (auto it = hist.counts.lower_bound(d_min); it != hist.counts.end(); ++it) {
        if (it->second == 0) continue;
        degree.push_back(static_cast<double>(it->first));
        count.push_back(static_cast<double>(it->second));
        fit.n_tail += it->second;
    }
    fit.points = degree.size();

    if (method == FitMethod::LogLogRegression) {
        if (degree.size() < 10)
            throw FitError("regression needs >= 10 distinct degrees >= d_min, have " + std::to_string(degree.size()),
                           fit.n_tail);
        std::vector<double> x(degree.size()), y(degree.size());
        for (std::size_t i = 0; i < degree.size(); ++i) {
            x[i] = std::log(degree[i]);
            y[i] = std::log(count[i]);
        }
        const kernels::Moments m = kernels::regression_moments(x, y);
        const double n = static_cast<double>(m.n);
        const double sxx = m.sum_xx - m.sum_x * m.sum_x / n;
        const double sxy = m.sum_xy - m.sum_x * m.sum_y / n;
        const double syy = m.sum_yy - m.sum_y * m.sum_y / n;
        if (!(sxx > 0.0)) throw FitError("degenerate regression abscissae", fit.n_tail);
        fit.alpha = sxy / sxx;
        fit.quality = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
        return fit;
    }

    if (fit.n_tail < 10) throw FitError("MLE needs n_tail >= 10, have " + std::to_string(fit.n_tail), fit.n_tail);
    std::vector<double> log_ratio(degree.size());
    const double shift = static_cast<double>(d_min) - 0.5;
    for (std::size_t i = 0; i < degree.size(); ++i) log_ratio[i] = std::log(degree[i] / shift);
    const double weighted = kernels::dot(log_ratio, count);
    const double n = static_cast<double>(fit.n_tail);
    const double magnitude = 1.0 + n / weighted;
    fit.alpha = -magnitude;
    fit.quality = (magnitude - 1.0) / std::sqrt(n);
    return fit;
}

void write_histogram_csv(std::ostream& os, const DegreeHistogram& hist) {
    os << "degree,count\n";
    for (const auto& [d, c] : hist.counts) os << d << ',' << c << '\n';
}

std::string fit_to_json(const PowerLawFit& fit) {
    nlohmann::json j;
    j["alpha"] = fit.alpha;
    j["magnitude"] = fit.magnitude();
    j["sign"] = fit.alpha < 0 ? -1 : 1;
    j["d_min"] = fit.d_min;
    j["method"] = fit_method_name(fit.method);
    j["quality"] = fit.quality;
    j["n_tail"] = fit.n_tail;
    j["points"] = fit.points;
    return j.dump();
}

}  // namespace searchnet
