#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace binnet {

// counts[t * C + p]: rows are true labels, columns predicted labels.
struct ConfusionMatrix {
    std::vector<std::string> catalog;
    std::vector<std::uint64_t> counts;

    std::size_t classes() const { return catalog.size(); }
    std::uint64_t at(std::size_t truth, std::size_t predicted) const {
        return counts[truth * classes() + predicted];
    }
    std::uint64_t total() const;
    std::uint64_t trace() const;
    std::uint64_t row_sum(std::size_t truth) const;
    std::uint64_t col_sum(std::size_t predicted) const;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& truths,
                                 const std::vector<int>& predictions,
                                 const std::vector<std::string>& catalog);

struct ClassMetrics {
    std::uint64_t support = 0; // true count of the class
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    // true when the corresponding ratio was 0/0 and defined as 0
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

struct MetricsReport {
    std::vector<ClassMetrics> per_class;
    std::uint64_t total = 0;
    double accuracy = 0;
    double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
    double weighted_precision = 0, weighted_recall = 0, weighted_f1 = 0;
};

// Per-class precision = TP/(TP+FP), recall = TP/(TP+FN), F1 = harmonic mean;
// accuracy = trace/total. 0/0 ratios are reported as 0 with a flag. Weighted
// aggregates weight by support; macro averages uniformly.
MetricsReport compute_metrics(const ConfusionMatrix& matrix);

// Aligned table with Accuracy / Precision / Recall / F1 Score columns,
// one row per class plus weighted and macro aggregate rows.
std::string render_metrics_text(const MetricsReport& report,
                                const std::vector<std::string>& catalog);

std::string metrics_csv(const MetricsReport& report,
                        const std::vector<std::string>& catalog);

// CSV grid, true labels in rows.
std::string confusion_csv(const ConfusionMatrix& matrix);

// Human-readable matrix with the largest off-diagonal confusions called out.
std::string render_confusion_text(const ConfusionMatrix& matrix);

} // namespace binnet
