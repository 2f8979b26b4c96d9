#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace noah {

// Dense row-major binary matrix (entries 0/1).
struct BinaryMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> data;

    BinaryMatrix() = default;
    BinaryMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0) {}

    uint8_t at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const uint8_t* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

    bool operator==(const BinaryMatrix&) const = default;
};

// Hypergraph with a binary per-node attribute matrix. Hyperedges are stored
// as sorted, duplicate-free id vectors; duplicate hyperedges are retained
// (multiplicity counts toward degrees). Treat as immutable once built.
struct AttributedHypergraph {
    int node_count = 0;
    std::vector<std::vector<int>> hyperedges;
    BinaryMatrix attributes;

    int edge_count() const { return static_cast<int>(hyperedges.size()); }
    int attr_count() const { return attributes.cols; }

    // Throws std::invalid_argument if an invariant is broken.
    void validate() const;
};

// Per-node raw attribute table prior to binarization.
struct RawColumn {
    enum class Kind { categorical, continuous };
    Kind kind = Kind::categorical;
    std::vector<std::string> labels;  // used when categorical
    std::vector<double> values;       // used when continuous
};

struct RawAttributeTable {
    int rows = 0;
    std::vector<RawColumn> columns;
};

// Categorical columns expand to one-hot blocks (values in sorted order);
// continuous columns map to 1 iff value >= threshold. `thresholds` is keyed
// by input column index and must cover every continuous column.
BinaryMatrix binarize_attributes(const RawAttributeTable& raw,
                                 const std::map<int, double>& thresholds);

// Edge file: one hyperedge per line, base-10 node ids separated by commas or
// whitespace. Attribute file: one line per node, space-separated 0/1 tokens.
// '#'-prefixed lines are comments in both files. Duplicate ids within one
// edge line are deduplicated with a warning appended to `warnings`.
AttributedHypergraph load_hypergraph(const std::filesystem::path& edge_path,
                                     const std::filesystem::path& attr_path,
                                     std::vector<std::string>* warnings = nullptr);

// Inverse of load_hypergraph (atomic: temp file + rename).
void save_edges(const AttributedHypergraph& h, const std::filesystem::path& edge_path);
void save_attributes(const AttributedHypergraph& h, const std::filesystem::path& attr_path);

std::vector<int> degree_vector(const AttributedHypergraph& h);
std::vector<int> size_vector(const AttributedHypergraph& h);

// Writes `text` to `path` via a sibling temp file and rename.
void atomic_write(const std::filesystem::path& path, const std::string& text);

}  // namespace noah
