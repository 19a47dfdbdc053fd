#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gap/maskforge.hpp"

namespace gap::shapestats {

inline constexpr int kFeatureCount = 8;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "area", "perimeter", "aspect_ratio", "solidity", "circularity", "compactness", "vertices", "concavities"};

struct ShapeFeatures {
  double area = 0.0;
  double perimeter = 0.0;
  double aspect_ratio = 0.0;
  double solidity = 0.0;
  double circularity = 0.0;
  double compactness = 0.0;
  int vertices = 0;
  int concavities = 0;

  std::array<double, kFeatureCount> as_array() const;
};

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Outer 8-connected contour through boundary pixel centers (Moore-neighbor
// tracing), starting at the first foreground pixel in row-major order.
std::vector<Point> trace_outer_contour(const maskforge::BinaryMask& mask);

// Boundary length by Cauchy-Crofton intercept counting along rows, columns
// and both diagonals.
double crofton_perimeter(const maskforge::BinaryMask& mask);

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
std::vector<Point> convex_hull(std::vector<Point> points);
// Shoelace area of a lattice polygon plus Pick's boundary term: the number of
// pixel centers inside or on the polygon.
double lattice_hull_area(const std::vector<Point>& hull);

// Closed-curve Douglas-Peucker; returns the retained contour indices.
std::vector<std::size_t> douglas_peucker_closed(const std::vector<Point>& contour, double epsilon);

// Signed turning angle per step of the 5-sample moving-average contour,
// positive for convex turns.
std::vector<double> discrete_curvature(const std::vector<Point>& contour);

inline constexpr double kConcavityThreshold = 0.05;  // radians per step
inline constexpr double kDouglasPeuckerFraction = 0.01;

ShapeFeatures extract_features(const maskforge::BinaryMask& mask);
std::vector<ShapeFeatures> extract_features_batch(const std::vector<maskforge::BinaryMask>& masks);
std::vector<ShapeFeatures> extract_features_batch_serial(const std::vector<maskforge::BinaryMask>& masks);

struct FeatureSummary {
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double iqr = 0.0;
};

// Median is the lower of the two middle values for even n; quartiles are
// median-exclusive Tukey hinges using the same median rule.
FeatureSummary summarize_values(std::vector<double> values);

struct SummaryStats {
  std::size_t n = 0;
  std::array<FeatureSummary, kFeatureCount> features{};
};

SummaryStats summarize(const std::vector<ShapeFeatures>& samples);

using FeatureMatrix = std::vector<std::array<double, kFeatureCount>>;

struct PcaResult {
  // Row c is the unit loading vector of component c.
  std::array<std::array<double, kFeatureCount>, kFeatureCount> loadings{};
  std::array<double, kFeatureCount> eigenvalues{};
  std::array<double, kFeatureCount> explained_variance_ratio{};
  FeatureMatrix projected;
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> sd{};
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. Eigenvalues are
// returned descending, eigenvectors as rows.
void jacobi_eigen(std::array<std::array<double, kFeatureCount>, kFeatureCount> matrix,
                  std::array<double, kFeatureCount>& eigenvalues,
                  std::array<std::array<double, kFeatureCount>, kFeatureCount>& eigenvectors);

// Z-scores the columns, eigendecomposes their covariance and projects.
// Throws DataError naming a constant column, or for n < 9.
PcaResult pca(const FeatureMatrix& samples);

struct ValidationReport {
  SummaryStats real;
  SummaryStats synth;
  std::array<double, kFeatureCount> relative_mean_difference{};  // (synth - real) / |real|
  std::optional<PcaResult> pooled_pca;
  std::string pca_note;
  std::vector<int> group;  // 0 = real, 1 = synthetic, aligned with pooled_pca->projected
  std::array<double, 2> real_centroid{};
  std::array<double, 2> synth_centroid{};
  double centroid_gap_pooled_sd = 0.0;  // PC1/PC2 centroid distance over pooled sd
};

ValidationReport compare_distributions(const std::vector<ShapeFeatures>& real,
                                       const std::vector<ShapeFeatures>& synth);

}  // namespace gap::shapestats
