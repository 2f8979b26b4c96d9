#include "noah/hypergraph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace noah {

namespace {

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

bool is_comment(const std::string& line) {
    for (unsigned char c : line) {
        if (std::isspace(c)) continue;
        return c == '#';
    }
    return false;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open file: " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

int parse_node_id(std::string_view token, const std::filesystem::path& path, size_t line_no) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value < 0) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                    ": bad node id '" + std::string(token) + "'");
    }
    return value;
}

}  // namespace

void AttributedHypergraph::validate() const {
    if (node_count < 1) {
        throw std::invalid_argument("hypergraph must have at least one node");
    }
    if (attributes.rows != node_count) {
        throw std::invalid_argument("attribute row count does not match node count");
    }
    for (uint8_t v : attributes.data) {
        if (v != 0 && v != 1) {
            throw std::invalid_argument("attribute matrix entries must be 0 or 1");
        }
    }
    for (size_t j = 0; j < hyperedges.size(); ++j) {
        const auto& e = hyperedges[j];
        if (e.empty()) {
            throw std::invalid_argument("hyperedge " + std::to_string(j) + " is empty");
        }
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] < 0 || e[i] >= node_count) {
                throw std::invalid_argument("hyperedge " + std::to_string(j) +
                                            " references node id out of range");
            }
            if (i > 0 && e[i] <= e[i - 1]) {
                throw std::invalid_argument("hyperedge " + std::to_string(j) +
                                            " is not sorted/duplicate-free");
            }
        }
    }
}

BinaryMatrix binarize_attributes(const RawAttributeTable& raw,
                                 const std::map<int, double>& thresholds) {
    // First pass: figure out the expanded width and per-column encodings.
    struct Encoding {
        bool continuous = false;
        double threshold = 0.0;
        std::vector<std::string> values;  // sorted distinct labels when categorical
    };
    std::vector<Encoding> enc(raw.columns.size());
    int width = 0;
    for (size_t c = 0; c < raw.columns.size(); ++c) {
        const auto& col = raw.columns[c];
        if (col.kind == RawColumn::Kind::continuous) {
            auto it = thresholds.find(static_cast<int>(c));
            if (it == thresholds.end()) {
                throw std::invalid_argument("missing threshold for continuous column " +
                                            std::to_string(c));
            }
            if (static_cast<int>(col.values.size()) != raw.rows) {
                throw std::invalid_argument("column " + std::to_string(c) + " row count mismatch");
            }
            enc[c].continuous = true;
            enc[c].threshold = it->second;
            width += 1;
        } else {
            if (static_cast<int>(col.labels.size()) != raw.rows) {
                throw std::invalid_argument("column " + std::to_string(c) + " row count mismatch");
            }
            std::set<std::string> distinct(col.labels.begin(), col.labels.end());
            if (distinct.size() < 2) {
                throw std::invalid_argument("categorical column " + std::to_string(c) +
                                            " needs at least 2 observed values");
            }
            enc[c].values.assign(distinct.begin(), distinct.end());
            width += static_cast<int>(distinct.size());
        }
    }

    BinaryMatrix out(raw.rows, width);
    for (int r = 0; r < raw.rows; ++r) {
        int o = 0;
        for (size_t c = 0; c < raw.columns.size(); ++c) {
            if (enc[c].continuous) {
                out.at(r, o++) = raw.columns[c].values[r] >= enc[c].threshold ? 1 : 0;
            } else {
                const auto& vals = enc[c].values;
                auto it = std::lower_bound(vals.begin(), vals.end(), raw.columns[c].labels[r]);
                out.at(r, o + static_cast<int>(it - vals.begin())) = 1;
                o += static_cast<int>(vals.size());
            }
        }
    }
    return out;
}

AttributedHypergraph load_hypergraph(const std::filesystem::path& edge_path,
                                     const std::filesystem::path& attr_path,
                                     std::vector<std::string>* warnings) {
    AttributedHypergraph h;

    // Attributes first: node_count = number of attribute lines.
    std::vector<std::vector<uint8_t>> attr_rows;
    {
        const auto lines = read_lines(attr_path);
        int k = -1;
        for (size_t i = 0; i < lines.size(); ++i) {
            if (is_comment(lines[i])) continue;
            if (is_blank(lines[i])) {
                // tolerate a trailing blank line only
                bool rest_blank = true;
                for (size_t j = i; j < lines.size(); ++j) {
                    if (!is_blank(lines[j]) && !is_comment(lines[j])) rest_blank = false;
                }
                if (rest_blank) break;
                throw std::invalid_argument(attr_path.string() + ":" + std::to_string(i + 1) +
                                            ": blank attribute line");
            }
            std::istringstream ss(lines[i]);
            std::vector<uint8_t> row;
            std::string tok;
            while (ss >> tok) {
                if (tok == "0") {
                    row.push_back(0);
                } else if (tok == "1") {
                    row.push_back(1);
                } else {
                    throw std::invalid_argument(attr_path.string() + ":" + std::to_string(i + 1) +
                                                ": non-binary attribute token '" + tok + "'");
                }
            }
            if (k < 0) k = static_cast<int>(row.size());
            if (static_cast<int>(row.size()) != k) {
                throw std::invalid_argument(attr_path.string() + ":" + std::to_string(i + 1) +
                                            ": expected " + std::to_string(k) + " tokens");
            }
            attr_rows.push_back(std::move(row));
        }
        if (attr_rows.empty()) {
            throw std::invalid_argument(attr_path.string() + ": no attribute rows");
        }
        h.node_count = static_cast<int>(attr_rows.size());
        h.attributes = BinaryMatrix(h.node_count, k);
        for (int r = 0; r < h.node_count; ++r) {
            std::copy(attr_rows[r].begin(), attr_rows[r].end(),
                      h.attributes.data.begin() + static_cast<size_t>(r) * k);
        }
    }

    {
        const auto lines = read_lines(edge_path);
        for (size_t i = 0; i < lines.size(); ++i) {
            if (is_comment(lines[i])) continue;
            if (is_blank(lines[i])) {
                bool rest_blank = true;
                for (size_t j = i; j < lines.size(); ++j) {
                    if (!is_blank(lines[j]) && !is_comment(lines[j])) rest_blank = false;
                }
                if (rest_blank) break;
                throw std::invalid_argument(edge_path.string() + ":" + std::to_string(i + 1) +
                                            ": empty hyperedge line");
            }
            std::string norm = lines[i];
            std::replace(norm.begin(), norm.end(), ',', ' ');
            std::istringstream ss(norm);
            std::vector<int> edge;
            std::string tok;
            while (ss >> tok) {
                int id = parse_node_id(tok, edge_path, i + 1);
                if (id >= h.node_count) {
                    throw std::invalid_argument(edge_path.string() + ":" + std::to_string(i + 1) +
                                                ": node id " + std::to_string(id) +
                                                " >= node count " + std::to_string(h.node_count));
                }
                edge.push_back(id);
            }
            if (edge.empty()) {
                throw std::invalid_argument(edge_path.string() + ":" + std::to_string(i + 1) +
                                            ": empty hyperedge line");
            }
            std::sort(edge.begin(), edge.end());
            auto last = std::unique(edge.begin(), edge.end());
            if (last != edge.end()) {
                if (warnings) {
                    warnings->push_back(edge_path.string() + ":" + std::to_string(i + 1) +
                                        ": duplicate node ids in hyperedge, deduplicated");
                }
                edge.erase(last, edge.end());
            }
            h.hyperedges.push_back(std::move(edge));
        }
    }

    h.validate();
    return h;
}

void save_edges(const AttributedHypergraph& h, const std::filesystem::path& edge_path) {
    std::string out;
    for (const auto& e : h.hyperedges) {
        for (size_t i = 0; i < e.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(e[i]);
        }
        out += '\n';
    }
    atomic_write(edge_path, out);
}

void save_attributes(const AttributedHypergraph& h, const std::filesystem::path& attr_path) {
    std::string out;
    for (int r = 0; r < h.node_count; ++r) {
        for (int c = 0; c < h.attributes.cols; ++c) {
            if (c) out += ' ';
            out += h.attributes.at(r, c) ? '1' : '0';
        }
        out += '\n';
    }
    atomic_write(attr_path, out);
}

std::vector<int> degree_vector(const AttributedHypergraph& h) {
    std::vector<int> deg(h.node_count, 0);
    for (const auto& e : h.hyperedges) {
        for (int v : e) deg[v]++;
    }
    return deg;
}

std::vector<int> size_vector(const AttributedHypergraph& h) {
    std::vector<int> sizes;
    sizes.reserve(h.hyperedges.size());
    for (const auto& e : h.hyperedges) sizes.push_back(static_cast<int>(e.size()));
    return sizes;
}

void atomic_write(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace noah
