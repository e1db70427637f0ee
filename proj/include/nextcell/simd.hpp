// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

namespace nextcell::simd {

/// Instruction sets the dispatcher can select. `scalar` is the portable
/// reference path and is always available; the vector paths are picked at
/// runtime when the CPU supports them.
enum class Isa { scalar, avx2, neon };

/// Currently selected instruction set.
Isa active_isa();
std::string_view isa_name(Isa isa);

/// True when the given instruction set can run on this machine.
bool isa_supported(Isa isa);

/// Force a specific instruction set (used by the equivalence tests).
/// Throws ConfigError when the CPU does not support it.
void set_isa(Isa isa);

/// Dot product of two length-n vectors.
double dot(const double* a, const double* b, std::size_t n);

/// Squared Euclidean distance between two length-n vectors.
double sqdist(const double* a, const double* b, std::size_t n);

/// Advances a bank of n phasors in place by one step and returns the sum of
/// the updated cosine components: (c,s) <- (c*dc - s*ds, c*ds + s*dc).
/// Each lane is an independent oscillator; (dc[i], ds[i]) hold the per-step
/// rotation cos/sin for oscillator i.
double rotate_and_sum(double* c, double* s, const double* dc, const double* ds, std::size_t n);

} // namespace nextcell::simd
