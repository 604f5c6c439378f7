#include "swarmtune/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "swarmtune/errors.hpp"
#include "swarmtune/trace.hpp"

namespace swarmtune {

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::row_sum(std::size_t true_class) const {
  const std::size_t k = num_classes();
  std::size_t sum = 0;
  for (std::size_t p = 0; p < k; ++p) sum += counts[true_class * k + p];
  return sum;
}

std::size_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  const std::size_t k = num_classes();
  std::size_t sum = 0;
  for (std::size_t t = 0; t < k; ++t) sum += counts[t * k + predicted];
  return sum;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& true_labels,
                                 const std::vector<int>& predicted_labels, std::size_t num_classes,
                                 std::vector<std::string> class_names) {
  if (true_labels.size() != predicted_labels.size()) {
    throw InputError("confusion matrix: label vectors differ in length");
  }
  if (num_classes == 0) throw InputError("confusion matrix: need at least one class");
  if (!class_names.empty() && class_names.size() != num_classes) {
    throw InputError("confusion matrix: class name count does not match class count");
  }

  ConfusionMatrix cm;
  if (class_names.empty()) {
    for (std::size_t k = 0; k < num_classes; ++k) cm.class_names.push_back("class_" + std::to_string(k));
  } else {
    cm.class_names = std::move(class_names);
  }
  cm.counts.assign(num_classes * num_classes, 0);
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels[i];
    const int p = predicted_labels[i];
    if (t < 0 || static_cast<std::size_t>(t) >= num_classes || p < 0 ||
        static_cast<std::size_t>(p) >= num_classes) {
      throw InputError("confusion matrix: label out of range at index " + std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(t) * num_classes + static_cast<std::size_t>(p)];
  }
  return cm;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

ClassMetrics class_metrics(const ConfusionMatrix& cm) {
  const std::size_t k = cm.num_classes();
  if (k == 0 || cm.counts.size() != k * k) throw InputError("class metrics: empty confusion matrix");
  const std::size_t total = cm.total();
  if (total == 0) throw InputError("class metrics: confusion matrix holds no samples");

  ClassMetrics out;
  std::size_t trace = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t diag = cm.at(c, c);
    trace += diag;
    const std::size_t col = cm.column_sum(c);
    const std::size_t row = cm.row_sum(c);
    PerClassMetrics m;
    m.precision_defined = col > 0;
    m.recall_defined = row > 0;
    m.precision = col > 0 ? static_cast<double>(diag) / static_cast<double>(col) : 0.0;
    m.recall = row > 0 ? static_cast<double>(diag) / static_cast<double>(row) : 0.0;
    m.f1_defined = m.precision + m.recall > 0.0;
    m.f1 = f1_score(m.precision, m.recall);
    out.per_class.push_back(m);
  }
  out.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  return out;
}

void write_metrics_csv(std::ostream& out, const ConfusionMatrix& cm, const ClassMetrics& metrics) {
  out << "class,precision,recall,f1\n";
  for (std::size_t c = 0; c < metrics.per_class.size(); ++c) {
    const auto& m = metrics.per_class[c];
    out << cm.class_names[c] << ',' << format_real(m.precision) << ',' << format_real(m.recall)
        << ',' << format_real(m.f1) << '\n';
  }
  out << "accuracy," << format_real(metrics.accuracy) << '\n';
}

void print_metrics_table(std::ostream& out, const std::string& heading, const ConfusionMatrix& cm,
                         const ClassMetrics& metrics) {
  const auto saved_flags = out.flags();
  const auto saved_precision = out.precision();
  std::size_t name_width = 8;
  for (const auto& name : cm.class_names) name_width = std::max(name_width, name.size());

  out << heading << '\n';
  out << "  " << std::left << std::setw(static_cast<int>(name_width) + 2) << "Class" << std::right
      << std::setw(10) << "Precision" << std::setw(8) << "Recall" << std::setw(10) << "F1-score"
      << '\n';
  bool any_undefined = false;
  auto cell = [&](double value, bool defined) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << value;
    if (!defined) {
      s << '*';
      any_undefined = true;
    }
    return s.str();
  };
  for (std::size_t c = 0; c < metrics.per_class.size(); ++c) {
    const auto& m = metrics.per_class[c];
    out << "  " << std::left << std::setw(static_cast<int>(name_width) + 2) << cm.class_names[c]
        << std::right << std::setw(10) << cell(m.precision, m.precision_defined) << std::setw(8)
        << cell(m.recall, m.recall_defined) << std::setw(10) << cell(m.f1, m.f1_defined) << '\n';
  }
  out << "  Accuracy: " << std::fixed << std::setprecision(2) << metrics.accuracy << " ("
      << cm.total() << " samples)\n";
  if (any_undefined) out << "  * ratio was 0/0, reported as 0\n";
  out.flags(saved_flags);
  out.precision(saved_precision);
}

}  // namespace swarmtune
