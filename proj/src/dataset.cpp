#include "ufcm/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ufcm/random.hpp"

namespace ufcm {

CsvError::CsvError(const std::string& message, std::size_t row, std::size_t column)
    : DataError("csv line " + std::to_string(row) +
                (column ? ", column " + std::to_string(column) : std::string()) + ": " +
                message),
      row_(row),
      column_(column) {}

int DataMatrix::class_count() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end()) + 1;
}

void DataMatrix::validate() const {
    if (features() < 1) throw DataError("dataset needs at least one feature");
    if (samples() < 2) throw DataError("dataset needs at least two samples");
    if (!values.allFinite()) throw DataError("dataset contains non-finite values");
    if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != features())
        throw DataError("feature name count does not match feature dimension");
    if (labels) {
        if (static_cast<Index>(labels->size()) != samples())
            throw DataError("label count does not match sample count");
        std::vector<bool> seen(static_cast<std::size_t>(class_count()), false);
        for (int l : *labels) {
            if (l < 0) throw DataError("labels must be non-negative");
            seen[static_cast<std::size_t>(l)] = true;
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            throw DataError("label indices are not contiguous");
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

// Maps raw label strings onto 0..c-1. Integer-valued labels keep numeric order,
// anything else is ordered lexicographically.
std::vector<int> reindex_labels(const std::vector<std::string>& raw) {
    bool all_integer = true;
    for (const auto& s : raw) {
        const std::string t = trim(s);
        long long v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
            all_integer = false;
            break;
        }
    }
    std::vector<int> out;
    out.reserve(raw.size());
    if (all_integer) {
        std::map<long long, int> ids;
        for (const auto& s : raw) ids.emplace(std::stoll(trim(s)), 0);
        int next = 0;
        for (auto& [key, id] : ids) id = next++;
        for (const auto& s : raw) out.push_back(ids.at(std::stoll(trim(s))));
    } else {
        std::map<std::string, int> ids;
        for (const auto& s : raw) ids.emplace(trim(s), 0);
        int next = 0;
        for (auto& [key, id] : ids) id = next++;
        for (const auto& s : raw) out.push_back(ids.at(trim(s)));
    }
    return out;
}

void append_number(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

DataMatrix parse_csv(std::istream& in, const CsvOptions& options) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || trim(line) == "\r") continue;
        rows.push_back(split_line(line));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw DataError("csv input is empty");

    const std::size_t width = rows.front().size();
    std::optional<std::size_t> label_col = options.label_index;
    if (label_col && *label_col >= width)
        throw CsvError("label column index out of range", line_numbers.front(), 0);

    // A first line with any non-numeric feature cell is a header.
    bool has_header = options.label_name.has_value();
    if (!has_header) {
        for (std::size_t j = 0; j < width; ++j) {
            if (label_col && j == *label_col) continue;
            if (!trim(rows.front()[j]).empty() && !parse_real(rows.front()[j])) {
                has_header = true;
                break;
            }
        }
    }
    std::vector<std::string> header;
    if (has_header) header = rows.front();
    if (options.label_name) {
        auto it = std::find_if(header.begin(), header.end(),
                               [&](const std::string& h) { return trim(h) == *options.label_name; });
        if (it == header.end())
            throw CsvError("no column named '" + *options.label_name + "'", line_numbers.front(), 0);
        label_col = static_cast<std::size_t>(it - header.begin());
    }

    const std::size_t first = has_header ? 1 : 0;
    const std::size_t n = rows.size() - first;
    const std::size_t d = width - (label_col ? 1 : 0);
    if (n < 2) throw DataError("csv needs at least two sample rows, found " + std::to_string(n));
    if (d < 1) throw DataError("csv has no feature columns");

    DataMatrix data;
    data.values.resize(static_cast<Index>(d), static_cast<Index>(n));
    std::vector<std::string> raw_labels;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[first + i];
        const std::size_t ln = line_numbers[first + i];
        if (row.size() != width)
            throw CsvError("expected " + std::to_string(width) + " fields, found " +
                               std::to_string(row.size()),
                           ln, 0);
        std::size_t f = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (label_col && j == *label_col) {
                if (trim(row[j]).empty()) throw CsvError("blank label", ln, j + 1);
                raw_labels.push_back(row[j]);
                continue;
            }
            if (trim(row[j]).empty()) throw CsvError("blank cell", ln, j + 1);
            auto v = parse_real(row[j]);
            if (!v) throw CsvError("cannot parse '" + trim(row[j]) + "' as a number", ln, j + 1);
            if (!std::isfinite(*v)) throw CsvError("non-finite value", ln, j + 1);
            data.values(static_cast<Index>(f), static_cast<Index>(i)) = *v;
            ++f;
        }
    }
    if (has_header) {
        for (std::size_t j = 0; j < width; ++j)
            if (!(label_col && j == *label_col)) data.feature_names.push_back(trim(header[j]));
    }
    if (label_col) data.labels = reindex_labels(raw_labels);
    data.validate();
    return data;
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_csv(in, options);
}

void write_csv(const DataMatrix& data, std::ostream& out) {
    std::string buf;
    const Index d = data.features();
    for (Index j = 0; j < d; ++j) {
        if (j) buf += ',';
        buf += data.feature_names.empty() ? "f" + std::to_string(j)
                                          : data.feature_names[static_cast<std::size_t>(j)];
    }
    if (data.labels) buf += ",label";
    buf += '\n';
    for (Index i = 0; i < data.samples(); ++i) {
        for (Index j = 0; j < d; ++j) {
            if (j) buf += ',';
            append_number(buf, data.values(j, i));
        }
        if (data.labels) {
            buf += ',';
            buf += std::to_string((*data.labels)[static_cast<std::size_t>(i)]);
        }
        buf += '\n';
    }
    out << buf;
}

void write_csv(const DataMatrix& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_csv(data, out);
    if (!out) throw DataError("write failed for " + path.string());
}

std::pair<DataMatrix, CenterReport> center(const DataMatrix& data) {
    CenterReport report;
    report.mean_vector = data.values.rowwise().mean();
    report.was_centered = true;
    DataMatrix out = data;
    out.values.colwise() -= report.mean_vector;
    return {std::move(out), std::move(report)};
}

DataMatrix scale_unit_variance(const DataMatrix& data) {
    DataMatrix out = data;
    const Index n = data.samples();
    for (Index j = 0; j < data.features(); ++j) {
        const double mean = data.values.row(j).mean();
        const double var = (data.values.row(j).array() - mean).square().sum() / static_cast<double>(n - 1);
        if (var > 0.0) out.values.row(j) /= std::sqrt(var);
    }
    return out;
}

DataMatrix make_blobs(const BlobSpec& spec) {
    if (spec.n_per_cluster < 1 || spec.clusters < 1 || spec.d_informative < 1 || spec.d_noise < 0)
        throw DataError("blob counts must be positive");
    if (!(spec.separation > 0.0)) throw DataError("blob separation must be positive");
    if (!(spec.noise_scale >= 0.0)) throw DataError("blob noise scale must be non-negative");

    Rng rng(spec.seed);
    const int c = spec.clusters;
    const Index d_inf = spec.d_informative;
    Eigen::MatrixXd centers(d_inf, c);
    for (int k = 0; k < c; ++k)
        for (Index j = 0; j < d_inf; ++j) centers(j, k) = rng.normal();
    double min_dist = 0.0;
    for (int a = 0; a < c; ++a)
        for (int b = a + 1; b < c; ++b) {
            const double dist = (centers.col(a) - centers.col(b)).norm();
            if (min_dist == 0.0 || dist < min_dist) min_dist = dist;
        }
    centers *= (c > 1 && min_dist > 0.0) ? spec.separation / min_dist : spec.separation;

    const Index n = spec.n_per_cluster * c;
    const Index d = d_inf + spec.d_noise;
    DataMatrix data;
    data.values.resize(d, n);
    data.labels = std::vector<int>(static_cast<std::size_t>(n));
    for (int k = 0; k < c; ++k) {
        for (Index s = 0; s < spec.n_per_cluster; ++s) {
            const Index i = k * spec.n_per_cluster + s;
            for (Index j = 0; j < d_inf; ++j)
                data.values(j, i) = centers(j, k) + spec.noise_scale * rng.normal();
            for (Index j = d_inf; j < d; ++j) data.values(j, i) = spec.noise_scale * rng.normal();
            (*data.labels)[static_cast<std::size_t>(i)] = k;
        }
    }
    for (Index j = 0; j < d_inf; ++j) data.feature_names.push_back("informative_" + std::to_string(j));
    for (Index j = 0; j < spec.d_noise; ++j) data.feature_names.push_back("noise_" + std::to_string(j));
    return data;
}

std::uint64_t content_hash(const DataMatrix& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    };
    mix(static_cast<std::uint64_t>(data.features()));
    mix(static_cast<std::uint64_t>(data.samples()));
    for (Index i = 0; i < data.values.size(); ++i) mix(std::bit_cast<std::uint64_t>(data.values.data()[i]));
    if (data.labels)
        for (int l : *data.labels) mix(static_cast<std::uint64_t>(l));
    return h;
}

}  // namespace ufcm
