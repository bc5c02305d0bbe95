#pragma once

#include <random>
#include <utility>
#include <vector>

#include "tempo/dataset.hpp"
#include "tempo/models.hpp"

namespace tempo::detail {

// Seeded Gaussian init with stddev 1/sqrt(k), filled row-major so the draw
// order is independent of threading.
Matrix gaussian_init(int rows, int cols, std::mt19937_64& rng);

// Fit coefficients start as a time-constant model: degree-0 row Gaussian,
// higher degrees zero.
Matrix fit_init(int r, int k, std::mt19937_64& rng);

// One positive tensor cell. `other` is the co-index (item in user-major
// lists, user in item-major lists), `aux` is the bin index for binned models
// or the event index for continuous ones.
struct Cell {
    int other = 0;
    int aux = 0;
    double w = 1.0;
};

using CellLists = std::vector<std::vector<Cell>>;

// Matrix-style cells for WMF: unique (user, item) with the weight of the
// cell's latest event.
struct MatrixCells {
    CellLists by_user;
    CellLists by_item;
};
MatrixCells build_matrix_cells(const EventLog& log, const Vector& weights);

// Tensor cells for binned models: unique (user, item, bin), again keeping
// the latest event's weight per cell.
struct TensorCells {
    CellLists by_user;  // aux = bin
    CellLists by_item;  // aux = bin
    CellLists by_bin;   // other = user, aux = item
};
TensorCells build_tensor_cells(const EventLog& log, const BinnedLog& binned,
                               const Vector& weights);

// Continuous cells for the fit models: every event, with its normalized time
// and precomputed basis row.
struct ContinuousCells {
    std::vector<double> times;  // normalized, aligned with log.events()
    Matrix basis_rows;          // events x r
    Vector weights;
    CellLists by_user;  // aux = event index
    CellLists by_item;  // aux = event index
};
ContinuousCells build_continuous_cells(const EventLog& log, const LegendreBasis& basis,
                                       const Vector& weights);

inline Vector default_target(bool toward_ones, int k, double lambda) {
    return toward_ones ? Vector::Constant(k, lambda) : Vector::Zero(k);
}

}  // namespace tempo::detail
