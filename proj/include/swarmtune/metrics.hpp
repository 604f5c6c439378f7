#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace swarmtune {

// K x K count table: rows are true classes, columns are predicted classes.
struct ConfusionMatrix {
  std::vector<std::size_t> counts;  // row-major K*K
  std::vector<std::string> class_names;

  std::size_t num_classes() const { return class_names.size(); }
  std::size_t at(std::size_t true_class, std::size_t predicted) const {
    return counts[true_class * num_classes() + predicted];
  }
  std::size_t total() const;
  std::size_t row_sum(std::size_t true_class) const;
  std::size_t column_sum(std::size_t predicted) const;
};

// Builds the matrix from parallel label vectors. When class_names is empty,
// placeholder names class_0..class_{K-1} are generated.
ConfusionMatrix confusion_matrix(const std::vector<int>& true_labels,
                                 const std::vector<int>& predicted_labels, std::size_t num_classes,
                                 std::vector<std::string> class_names = {});

// A 0/0 ratio (class never predicted, or absent from the truth) yields 0 with
// its defined flag cleared, so reports can mark the degenerate entries.
struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;
};

struct ClassMetrics {
  std::vector<PerClassMetrics> per_class;
  double accuracy = 0.0;
};

// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);

// precision_k = diag/column-sum, recall_k = diag/row-sum, accuracy =
// trace/total. Throws InputError on an empty matrix.
ClassMetrics class_metrics(const ConfusionMatrix& cm);

// CSV report: header, one class,precision,recall,f1 row per class at full
// precision, then a final accuracy,<value> row.
void write_metrics_csv(std::ostream& out, const ConfusionMatrix& cm, const ClassMetrics& metrics);

// Two-decimal table for terminals; entries whose ratio was 0/0 are marked '*'.
void print_metrics_table(std::ostream& out, const std::string& heading, const ConfusionMatrix& cm,
                         const ClassMetrics& metrics);

}  // namespace swarmtune
