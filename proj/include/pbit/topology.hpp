#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace pbit {

// A Chimera fabric is a rows x cols grid of K(shore_size, shore_size)
// bipartite unit cells. Within a cell every vertical-shore node couples to
// every horizontal-shore node. Between cells, vertical-shore nodes couple to
// the same-index vertical node of the cell above/below, horizontal-shore
// nodes to the same-index horizontal node of the cell left/right. Cells can
// be removed from the grid (on the chip one cell is replaced by bias and
// interface circuitry); no edges touch a removed cell.

enum class Shore : std::uint8_t { Vertical = 0, Horizontal = 1 };
enum class Color : std::uint8_t { A = 0, B = 1 };

struct CellCoord {
    int row = 0;
    int col = 0;
    friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

struct NodeId {
    int cell_row = 0;
    int cell_col = 0;
    Shore shore = Shore::Vertical;
    int index_in_shore = 0;
    friend bool operator==(const NodeId&, const NodeId&) = default;
};

struct Edge {
    int a = 0; // flat ids, a < b always
    int b = 0;
};

class ChimeraTopology {
public:
    struct Neighbor {
        int node = 0;
        int edge = 0;
    };

    // Flat numbering: enabled cells in row-major order, vertical shore before
    // horizontal shore, index_in_shore ascending. Edge ids follow the cell
    // scan: per cell all intra-cell pairs (vertical index major), then the
    // couplers to the cell below, then to the cell on the right.
    ChimeraTopology(int rows, int cols, int shore_size, std::vector<CellCoord> disabled_cells = {});

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int shore_size() const { return shore_size_; }
    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int enabled_cell_count() const { return static_cast<int>(cells_.size()); }
    const std::vector<CellCoord>& disabled_cells() const { return disabled_; }

    bool cell_enabled(int row, int col) const;
    const std::vector<Edge>& edges() const { return edges_; }

    int flat_id(const NodeId& node) const;   // throws std::out_of_range on invalid/disabled
    NodeId structured(int flat) const;       // inverse of flat_id
    int cell_index_of(int flat) const;       // dense enabled-cell index (RNG bank lane mapping)

    // Intra-cell neighbors first (other shore, index ascending), then
    // inter-cell: vertical shore up then down, horizontal shore left then right.
    const std::vector<Neighbor>& neighbors(int flat) const;

    // Proper two-coloring: color = shore xor ((cell_row + cell_col) mod 2).
    Color color_of(int flat) const;
    std::vector<Color> two_coloring() const;

private:
    int rows_;
    int cols_;
    int shore_size_;
    int node_count_ = 0;
    std::vector<CellCoord> disabled_;
    std::vector<int> dense_cell_;          // row*cols+col -> dense index or -1
    std::vector<CellCoord> cells_;         // dense index -> coordinates
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;

    int node_of(int dense_cell, Shore shore, int k) const;
    void check_node(int flat) const;
};

} // namespace pbit
