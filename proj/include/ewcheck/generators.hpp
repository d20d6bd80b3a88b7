#pragma once

#include <cstdint>

#include "ewcheck/weyl.hpp"

namespace ew {

/// Seeded random Weyl structure on a (y, x, t) chart: h = L^T D L with a unit
/// upper-triangular L over degree-1 polynomial entries and a signature
/// (+, +, -) diagonal D built from everywhere-positive factors, so h is
/// nondegenerate on the whole chart; omega has random degree-1 components.
WeylStructure random_weyl_structure(uint64_t seed);

/// Random rational conformal factor over the given table, nonzero at the
/// reference point.
Expr random_conformal_factor(const TablePtr& table, uint64_t seed, const RefPoint& refpoint = {1, 1, 1});

/// Random nonzero rational Toda kernel N(v, w, z) over the given table.
Expr random_toda_kernel(const TablePtr& table, uint64_t seed);

}  // namespace ew
