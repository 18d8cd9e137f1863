#ifndef FUZZYCLASS_FEATURES_MATRIX_HPP
#define FUZZYCLASS_FEATURES_MATRIX_HPP

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fuzzyclass/corpus.hpp"
#include "fuzzyclass/error.hpp"
#include "fuzzyclass/parallel.hpp"

namespace fuzzyclass {

struct Anchor {
    std::string class_label;
    std::string version;
    std::string sample_name;
    FeatureTriple features;

    std::string id() const { return class_label + "/" + version + "/" + sample_name; }

    friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// Training samples used as reference points, ordered by (class, version, sample).
struct AnchorSet {
    std::vector<Anchor> anchors;

    static AnchorSet from_records(std::span<const SampleRecord> records) {
        AnchorSet s;
        for (const auto& r : records) s.anchors.push_back({r.class_label, r.version, r.sample_name, r.features});
        std::sort(s.anchors.begin(), s.anchors.end(), [](const Anchor& a, const Anchor& b) {
            return std::tie(a.class_label, a.version, a.sample_name) < std::tie(b.class_label, b.version, b.sample_name);
        });
        return s;
    }

    std::size_t size() const { return anchors.size(); }
    bool empty() const { return anchors.empty(); }

    friend bool operator==(const AnchorSet&, const AnchorSet&) = default;
};

inline constexpr std::size_t columns_per_anchor = 3;

constexpr std::size_t column_index(std::size_t anchor, HashType t) {
    return anchor * columns_per_anchor + static_cast<std::size_t>(t);
}

constexpr HashType column_hash_type(std::size_t column) {
    return static_cast<HashType>(column % columns_per_anchor);
}

/// Dense row-major similarity matrix. Column (j, f) holds the score of hash
/// type f against anchor j; anchor-major, then file/strings/symbols.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    /// Copy restricted to the given rows and anchors (all three columns of each anchor).
    FeatureMatrix select(std::span<const std::size_t> row_idx, std::span<const std::size_t> anchor_idx) const {
        FeatureMatrix out(row_idx.size(), anchor_idx.size() * columns_per_anchor);
        for (std::size_t i = 0; i < row_idx.size(); ++i)
            for (std::size_t j = 0; j < anchor_idx.size(); ++j)
                for (std::size_t f = 0; f < columns_per_anchor; ++f)
                    out.at(i, j * columns_per_anchor + f) = at(row_idx[i], anchor_idx[j] * columns_per_anchor + f);
        if (!row_ids.empty())
            for (auto i : row_idx) out.row_ids.push_back(row_ids[i]);
        if (!column_names.empty())
            for (auto j : anchor_idx)
                for (std::size_t f = 0; f < columns_per_anchor; ++f)
                    out.column_names.push_back(column_names[j * columns_per_anchor + f]);
        return out;
    }

    std::vector<std::string> row_ids;
    std::vector<std::string> column_names;

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline std::vector<double> similarity_row(const FeatureTriple& sample, const AnchorSet& anchors) {
    std::vector<double> row(anchors.size() * columns_per_anchor);
    for (std::size_t j = 0; j < anchors.size(); ++j)
        for (auto t : all_hash_types)
            row[column_index(j, t)] = compare(sample[t], anchors.anchors[j].features[t]);
    return row;
}

/// One row per sample: its similarity to every anchor for each hash type.
inline FeatureMatrix build_matrix(std::span<const SampleRecord> samples, const AnchorSet& anchors) {
    if (anchors.empty()) throw Error(ErrorKind::DegenerateInput, "anchor set is empty");
    FeatureMatrix m(samples.size(), anchors.size() * columns_per_anchor);
    parallel_for(samples.size(), [&](std::size_t i) {
        const auto row = similarity_row(samples[i].features, anchors);
        std::copy(row.begin(), row.end(), &m.at(i, 0));
    });
    for (const auto& s : samples) m.row_ids.push_back(s.id());
    for (const auto& a : anchors.anchors)
        for (auto t : all_hash_types) m.column_names.push_back(a.id() + ":" + std::string(to_string(t)));
    return m;
}

/// Debug export: header row of column names, then one line per sample.
inline void write_matrix_csv(std::ostream& out, const FeatureMatrix& m) {
    out << "sample";
    for (const auto& c : m.column_names) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << (i < m.row_ids.size() ? m.row_ids[i] : std::to_string(i));
        for (std::size_t j = 0; j < m.cols(); ++j) out << ',' << m.at(i, j);
        out << '\n';
    }
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_FEATURES_MATRIX_HPP
