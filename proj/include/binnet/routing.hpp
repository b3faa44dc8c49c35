#pragma once

#include <string>
#include <vector>

namespace binnet {

inline constexpr const char* kHumanSortBin = "HUMAN_SORT";

struct RoutingDecision {
    std::string bin;      // class label, or HUMAN_SORT when below threshold
    std::string predicted; // argmax class regardless of routing
    double probability = 0;
    double threshold = 0;

    bool routed_to_class() const { return bin != kHumanSortBin; }
};

// Takes the argmax class (smallest index wins ties); routes to its bin only
// when its probability is strictly greater than the threshold, otherwise to
// the human-sort bin.
RoutingDecision route_waste(const std::vector<double>& probabilities,
                            const std::vector<std::string>& catalog,
                            double threshold);

// The one-line machine-parseable form printed by `binnet infer`.
std::string routing_line(const RoutingDecision& decision);

} // namespace binnet
