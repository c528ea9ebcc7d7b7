// matspace.hpp
// Exact-formula kernel for small dense matrices: 2x2 minors of 3x2 matrices,
// tolerance-based numeric rank, rank-1 connection tests, span dimension and
// 3-vector algebra. Everything here is pure and stateless.
#pragma once

#include <vector>

#include "rank1lab/types.hpp"

namespace rank1lab {

// det of the 2x2 submatrix made of rows i and j (1-based). The canonical
// minors are M12, M13, M23 (i < j); swapping the rows negates the value.
// Throws std::invalid_argument unless i != j and both are in {1,2,3}.
double minor_of(const Mat32& m, int i, int j);

// All three canonical minors, ordered (M12, M13, M23).
Vec3 minors_of(const Mat32& m);

// Count of singular values above rank_tol * largest singular value.
// The zero matrix has rank 0 regardless of tolerance.
int numeric_rank(const MatX& m, const Tolerance& tol = {});

// Ratio sigma_{k+1}/sigma_k at the decided rank cut (1 when full rank or
// zero); small values mean the rank decision had a wide margin.
double rank_gap(const MatX& m, const Tolerance& tol = {});

// Rank(a - b) == 1. Shapes must agree.
bool is_rank1_connected(const MatX& a, const MatX& b, const Tolerance& tol = {});

// Dimension of the linear span, via the numeric rank of the row-flattening.
int span_dim(const std::vector<Mat32>& ms, const Tolerance& tol = {});
int span_dim(const std::vector<Mat22>& ms, const Tolerance& tol = {});
int span_dim(const std::vector<MatX>& ms, const Tolerance& tol = {});

inline Vec3 cross3(const Vec3& x, const Vec3& y) { return x.cross(y); }
inline double dot3(const Vec3& x, const Vec3& y) { return x.dot(y); }

}  // namespace rank1lab
