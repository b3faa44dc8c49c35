#include "binnet/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "binnet/errors.hpp"

namespace binnet {

std::uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (std::size_t c = 0; c < classes(); ++c) t += at(c, c);
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < classes(); ++p) s += at(truth, p);
    return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
    std::uint64_t s = 0;
    for (std::size_t t = 0; t < classes(); ++t) s += at(t, predicted);
    return s;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& truths,
                                 const std::vector<int>& predictions,
                                 const std::vector<std::string>& catalog) {
    if (truths.size() != predictions.size())
        throw input_error("truth/prediction lengths differ: " + std::to_string(truths.size()) +
                          " vs " + std::to_string(predictions.size()));
    const auto c = static_cast<int>(catalog.size());
    if (c == 0) throw input_error("empty catalog");

    ConfusionMatrix m;
    m.catalog = catalog;
    m.counts.assign(catalog.size() * catalog.size(), 0);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] < 0 || truths[i] >= c || predictions[i] < 0 || predictions[i] >= c)
            throw input_error("label outside catalog at sample " + std::to_string(i));
        ++m.counts[static_cast<std::size_t>(truths[i]) * catalog.size() +
                   static_cast<std::size_t>(predictions[i])];
    }
    return m;
}

MetricsReport compute_metrics(const ConfusionMatrix& matrix) {
    const std::uint64_t total = matrix.total();
    if (total == 0) throw input_error("confusion matrix is empty");
    const std::size_t classes = matrix.classes();

    MetricsReport report;
    report.total = total;
    report.accuracy = static_cast<double>(matrix.trace()) / static_cast<double>(total);

    double weighted_p_num = 0, weighted_f1_num = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        const std::uint64_t tp = matrix.at(c, c);
        const std::uint64_t fp = matrix.col_sum(c) - tp;
        const std::uint64_t fn = matrix.row_sum(c) - tp;

        ClassMetrics cm;
        cm.support = tp + fn;
        if (tp + fp == 0)
            cm.precision_undefined = true;
        else
            cm.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        if (tp + fn == 0)
            cm.recall_undefined = true;
        else
            cm.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        if (cm.precision + cm.recall == 0)
            cm.f1_undefined = true;
        else
            cm.f1 = 2 * cm.precision * cm.recall / (cm.precision + cm.recall);

        report.macro_precision += cm.precision;
        report.macro_recall += cm.recall;
        report.macro_f1 += cm.f1;
        weighted_p_num += static_cast<double>(cm.support) * cm.precision;
        weighted_f1_num += static_cast<double>(cm.support) * cm.f1;
        report.per_class.push_back(cm);
    }
    report.macro_precision /= static_cast<double>(classes);
    report.macro_recall /= static_cast<double>(classes);
    report.macro_f1 /= static_cast<double>(classes);
    report.weighted_precision = weighted_p_num / static_cast<double>(total);
    report.weighted_f1 = weighted_f1_num / static_cast<double>(total);
    // support_c * (TP_c / support_c) telescopes to trace/total; computing it
    // that way keeps the weighted-recall == accuracy identity exact.
    report.weighted_recall = static_cast<double>(matrix.trace()) / static_cast<double>(total);
    return report;
}

namespace {

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::string render_metrics_text(const MetricsReport& report,
                                const std::vector<std::string>& catalog) {
    std::size_t name_w = 8;
    for (const auto& n : catalog) name_w = std::max(name_w, n.size());
    name_w = std::max(name_w, std::string("weighted").size());

    std::ostringstream out;
    out << std::string(name_w, ' ') << "  Accuracy  Precision  Recall  F1 Score  Support\n";
    auto row = [&](const std::string& name, const std::string& acc, double p, double r,
                   double f1, const std::string& support, bool flag) {
        out << name << std::string(name_w - name.size(), ' ') << "  ";
        out << (acc.empty() ? std::string(8, ' ') : acc + std::string(8 - std::min<std::size_t>(8, acc.size()), ' '));
        out << "  " << fmt3(p) << "      " << fmt3(r) << "   " << fmt3(f1) << "     " << support;
        if (flag) out << "  (0/0 reported as 0)";
        out << "\n";
    };
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& cm = report.per_class[c];
        row(c < catalog.size() ? catalog[c] : "class" + std::to_string(c), "", cm.precision,
            cm.recall, cm.f1, std::to_string(cm.support),
            cm.precision_undefined || cm.recall_undefined || cm.f1_undefined);
    }
    row("weighted", fmt3(report.accuracy), report.weighted_precision, report.weighted_recall,
        report.weighted_f1, std::to_string(report.total), false);
    row("macro", fmt3(report.accuracy), report.macro_precision, report.macro_recall,
        report.macro_f1, std::to_string(report.total), false);
    return out.str();
}

std::string metrics_csv(const MetricsReport& report,
                        const std::vector<std::string>& catalog) {
    std::ostringstream out;
    out << "class,accuracy,precision,recall,f1,support,zero_division\n";
    char buf[128];
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& cm = report.per_class[c];
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%llu,%d\n", cm.precision, cm.recall,
                      cm.f1, static_cast<unsigned long long>(cm.support),
                      cm.precision_undefined || cm.recall_undefined || cm.f1_undefined ? 1 : 0);
        out << (c < catalog.size() ? catalog[c] : "class" + std::to_string(c)) << "," << buf;
    }
    std::snprintf(buf, sizeof buf, "weighted,%.17g,%.17g,%.17g,%.17g,%llu,0\n", report.accuracy,
                  report.weighted_precision, report.weighted_recall, report.weighted_f1,
                  static_cast<unsigned long long>(report.total));
    out << buf;
    std::snprintf(buf, sizeof buf, "macro,%.17g,%.17g,%.17g,%.17g,%llu,0\n", report.accuracy,
                  report.macro_precision, report.macro_recall, report.macro_f1,
                  static_cast<unsigned long long>(report.total));
    out << buf;
    return out.str();
}

std::string confusion_csv(const ConfusionMatrix& matrix) {
    std::ostringstream out;
    out << "true\\predicted";
    for (const auto& n : matrix.catalog) out << "," << n;
    out << "\n";
    for (std::size_t t = 0; t < matrix.classes(); ++t) {
        out << matrix.catalog[t];
        for (std::size_t p = 0; p < matrix.classes(); ++p) out << "," << matrix.at(t, p);
        out << "\n";
    }
    return out.str();
}

std::string render_confusion_text(const ConfusionMatrix& matrix) {
    std::size_t w = 5;
    for (const auto& n : matrix.catalog) w = std::max(w, n.size());
    std::ostringstream out;
    out << std::string(w, ' ');
    for (const auto& n : matrix.catalog)
        out << " " << std::string(w - n.size(), ' ') << n;
    out << "\n";
    for (std::size_t t = 0; t < matrix.classes(); ++t) {
        out << matrix.catalog[t] << std::string(w - matrix.catalog[t].size(), ' ');
        for (std::size_t p = 0; p < matrix.classes(); ++p) {
            const std::string v = std::to_string(matrix.at(t, p));
            out << " " << std::string(w - std::min(w, v.size()), ' ') << v;
        }
        out << "\n";
    }

    // call out the worst off-diagonal confusions
    std::vector<std::pair<std::uint64_t, std::pair<std::size_t, std::size_t>>> offdiag;
    for (std::size_t t = 0; t < matrix.classes(); ++t)
        for (std::size_t p = 0; p < matrix.classes(); ++p)
            if (t != p && matrix.at(t, p) > 0) offdiag.push_back({matrix.at(t, p), {t, p}});
    std::stable_sort(offdiag.begin(), offdiag.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    if (offdiag.empty()) {
        out << "\nno off-diagonal confusions\n";
    } else {
        out << "\nmost confused:\n";
        for (std::size_t i = 0; i < std::min<std::size_t>(3, offdiag.size()); ++i) {
            const auto& [count, tp] = offdiag[i];
            out << "  true=" << matrix.catalog[tp.first] << " predicted=" << matrix.catalog[tp.second]
                << " count=" << count << "\n";
        }
    }
    return out.str();
}

} // namespace binnet
