#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ufcm {

using Index = Eigen::Index;

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for malformed CSV input. Row is the 1-based line number in the file,
/// column the 1-based field position on that line (0 when the whole row is at fault).
class CsvError : public DataError {
public:
    CsvError(const std::string& message, std::size_t row, std::size_t column);
    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Dataset X stored features x samples (d rows, n columns).
///
/// Ground-truth labels ride along for evaluation only. The solver consumes
/// `values` alone, so it never sees them.
struct DataMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> feature_names;  // empty or size d
    std::optional<std::vector<int>> labels;  // contiguous 0..c_true-1, size n

    Index features() const { return values.rows(); }
    Index samples() const { return values.cols(); }
    bool has_labels() const { return labels.has_value(); }
    int class_count() const;

    // Throws DataError when any invariant is broken.
    void validate() const;
};

struct CenterReport {
    Eigen::VectorXd mean_vector;
    bool was_centered = false;
};

struct CsvOptions {
    std::optional<std::string> label_name;   // requires a header line
    std::optional<std::size_t> label_index;  // zero-based column
};

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
DataMatrix parse_csv(std::istream& in, const CsvOptions& options = {});

// Samples as rows, shortest round-trip number formatting, label column last named "label".
void write_csv(const DataMatrix& data, std::ostream& out);
void write_csv(const DataMatrix& data, const std::filesystem::path& path);

std::pair<DataMatrix, CenterReport> center(const DataMatrix& data);

// Divides each feature by its sample standard deviation; constant features are left as is.
DataMatrix scale_unit_variance(const DataMatrix& data);

struct BlobSpec {
    Index n_per_cluster = 100;
    int clusters = 3;
    Index d_informative = 10;
    Index d_noise = 40;
    double separation = 4.0;
    double noise_scale = 1.0;
    std::uint64_t seed = 0;
};

/// Gaussian clusters. Rows 0..d_informative-1 carry the cluster structure: cluster
/// centers are drawn at random and rescaled so the closest pair is exactly
/// `separation` apart, samples spread around them with std `noise_scale`.
/// The remaining d_noise rows are N(0, noise_scale^2) regardless of cluster.
/// Samples are ordered cluster by cluster.
DataMatrix make_blobs(const BlobSpec& spec);

// FNV-1a over dimensions, value bits and labels. Stable identifier for result records.
std::uint64_t content_hash(const DataMatrix& data);

}  // namespace ufcm
