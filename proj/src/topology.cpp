#include "pbit/topology.hpp"

#include "pbit/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace pbit {

namespace {

std::uint64_t pair_key(int a, int b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

} // namespace

ChimeraTopology::ChimeraTopology(int rows, int cols, int shore_size, std::vector<CellCoord> disabled_cells)
    : rows_(rows), cols_(cols), shore_size_(shore_size) {
    if (rows < 1 || cols < 1 || shore_size < 1)
        throw config_error("chimera: rows, cols and shore_size must be >= 1");

    dense_cell_.assign(static_cast<std::size_t>(rows) * cols, 0);
    for (const CellCoord& c : disabled_cells) {
        if (c.row < 0 || c.row >= rows || c.col < 0 || c.col >= cols)
            throw config_error("chimera: disabled cell (" + std::to_string(c.row) + "," +
                               std::to_string(c.col) + ") outside the grid");
        if (dense_cell_[static_cast<std::size_t>(c.row) * cols + c.col] == -1) continue;
        dense_cell_[static_cast<std::size_t>(c.row) * cols + c.col] = -1;
        disabled_.push_back(c);
    }

    int next = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            auto& slot = dense_cell_[static_cast<std::size_t>(r) * cols + c];
            if (slot == -1) continue;
            slot = next++;
            cells_.push_back({r, c});
        }
    }
    node_count_ = next * 2 * shore_size;

    std::unordered_map<std::uint64_t, int> edge_of_pair;
    auto add_edge = [&](int a, int b) {
        edge_of_pair.emplace(pair_key(a, b), static_cast<int>(edges_.size()));
        edges_.push_back({a, b});
    };

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int cell = dense_cell_[static_cast<std::size_t>(r) * cols + c];
            if (cell == -1) continue;
            for (int i = 0; i < shore_size; ++i)
                for (int j = 0; j < shore_size; ++j)
                    add_edge(node_of(cell, Shore::Vertical, i), node_of(cell, Shore::Horizontal, j));
            if (r + 1 < rows && cell_enabled(r + 1, c)) {
                const int below = dense_cell_[static_cast<std::size_t>(r + 1) * cols + c];
                for (int k = 0; k < shore_size; ++k)
                    add_edge(node_of(cell, Shore::Vertical, k), node_of(below, Shore::Vertical, k));
            }
            if (c + 1 < cols && cell_enabled(r, c + 1)) {
                const int right = dense_cell_[static_cast<std::size_t>(r) * cols + c + 1];
                for (int k = 0; k < shore_size; ++k)
                    add_edge(node_of(cell, Shore::Horizontal, k), node_of(right, Shore::Horizontal, k));
            }
        }
    }

    adjacency_.resize(node_count_);
    auto link = [&](int u, int v) {
        const auto it = edge_of_pair.find(pair_key(std::min(u, v), std::max(u, v)));
        adjacency_[u].push_back({v, it->second});
    };
    for (int flat = 0; flat < node_count_; ++flat) {
        const NodeId id = structured(flat);
        const int cell = dense_cell_[static_cast<std::size_t>(id.cell_row) * cols + id.cell_col];
        const Shore other = id.shore == Shore::Vertical ? Shore::Horizontal : Shore::Vertical;
        for (int k = 0; k < shore_size; ++k) link(flat, node_of(cell, other, k));
        if (id.shore == Shore::Vertical) {
            if (id.cell_row > 0 && cell_enabled(id.cell_row - 1, id.cell_col))
                link(flat, node_of(dense_cell_[static_cast<std::size_t>(id.cell_row - 1) * cols + id.cell_col],
                                   Shore::Vertical, id.index_in_shore));
            if (id.cell_row + 1 < rows && cell_enabled(id.cell_row + 1, id.cell_col))
                link(flat, node_of(dense_cell_[static_cast<std::size_t>(id.cell_row + 1) * cols + id.cell_col],
                                   Shore::Vertical, id.index_in_shore));
        } else {
            if (id.cell_col > 0 && cell_enabled(id.cell_row, id.cell_col - 1))
                link(flat, node_of(dense_cell_[static_cast<std::size_t>(id.cell_row) * cols + id.cell_col - 1],
                                   Shore::Horizontal, id.index_in_shore));
            if (id.cell_col + 1 < cols && cell_enabled(id.cell_row, id.cell_col + 1))
                link(flat, node_of(dense_cell_[static_cast<std::size_t>(id.cell_row) * cols + id.cell_col + 1],
                                   Shore::Horizontal, id.index_in_shore));
        }
    }
}

bool ChimeraTopology::cell_enabled(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_) return false;
    return dense_cell_[static_cast<std::size_t>(row) * cols_ + col] != -1;
}

int ChimeraTopology::node_of(int dense_cell, Shore shore, int k) const {
    return dense_cell * 2 * shore_size_ + static_cast<int>(shore) * shore_size_ + k;
}

int ChimeraTopology::flat_id(const NodeId& node) const {
    if (node.cell_row < 0 || node.cell_row >= rows_ || node.cell_col < 0 || node.cell_col >= cols_)
        throw std::out_of_range("chimera: cell coordinates out of range");
    if (node.index_in_shore < 0 || node.index_in_shore >= shore_size_)
        throw std::out_of_range("chimera: index_in_shore out of range");
    const int cell = dense_cell_[static_cast<std::size_t>(node.cell_row) * cols_ + node.cell_col];
    if (cell == -1) throw std::out_of_range("chimera: node lies in a disabled cell");
    return node_of(cell, node.shore, node.index_in_shore);
}

NodeId ChimeraTopology::structured(int flat) const {
    check_node(flat);
    const int per_cell = 2 * shore_size_;
    const CellCoord cc = cells_[flat / per_cell];
    const int within = flat % per_cell;
    return {cc.row, cc.col, within < shore_size_ ? Shore::Vertical : Shore::Horizontal,
            within % shore_size_};
}

int ChimeraTopology::cell_index_of(int flat) const {
    check_node(flat);
    return flat / (2 * shore_size_);
}

const std::vector<ChimeraTopology::Neighbor>& ChimeraTopology::neighbors(int flat) const {
    check_node(flat);
    return adjacency_[flat];
}

Color ChimeraTopology::color_of(int flat) const {
    const NodeId id = structured(flat);
    const int bit = static_cast<int>(id.shore) ^ ((id.cell_row + id.cell_col) & 1);
    return bit == 0 ? Color::A : Color::B;
}

std::vector<Color> ChimeraTopology::two_coloring() const {
    std::vector<Color> colors(node_count_);
    for (int i = 0; i < node_count_; ++i) colors[i] = color_of(i);
    return colors;
}

void ChimeraTopology::check_node(int flat) const {
    if (flat < 0 || flat >= node_count_) throw std::out_of_range("chimera: node id out of range");
}

} // namespace pbit
