#include "binnet/routing.hpp"

#include <cmath>
#include <cstdio>

#include "binnet/errors.hpp"

namespace binnet {

RoutingDecision route_waste(const std::vector<double>& probabilities,
                            const std::vector<std::string>& catalog,
                            double threshold) {
    if (probabilities.empty() || probabilities.size() != catalog.size())
        throw input_error("probability vector does not match catalog size");
    if (threshold < 0 || threshold > 1)
        throw config_error("routing threshold must be in [0,1]");
    double sum = 0;
    for (double p : probabilities) {
        if (!(p >= 0.0) || !(p <= 1.0 + 1e-9))
            throw input_error("probabilities must lie in [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw input_error("probabilities must sum to 1 (got " + std::to_string(sum) + ")");

    std::size_t best = 0;
    for (std::size_t i = 1; i < probabilities.size(); ++i)
        if (probabilities[i] > probabilities[best]) best = i;

    RoutingDecision d;
    d.predicted = catalog[best];
    d.probability = probabilities[best];
    d.threshold = threshold;
    d.bin = probabilities[best] > threshold ? catalog[best] : kHumanSortBin;
    return d;
}

std::string routing_line(const RoutingDecision& decision) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "bin=%s predicted=%s probability=%.6f threshold=%.6f",
                  decision.bin.c_str(), decision.predicted.c_str(), decision.probability,
                  decision.threshold);
    return buf;
}

} // namespace binnet
