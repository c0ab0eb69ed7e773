#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ta/la_core.hpp"

namespace ta {

enum class InstanceKind { GeneralUniform, GeneralGaussian, LowRank, IllConditioned };

struct InstanceSpec {
    InstanceKind kind = InstanceKind::GeneralUniform;
    int m = 0;
    int n = 0;
    std::uint64_t seed = 0;
    bool consistent = true;
};

struct Instance {
    DenseMatrix A;
    Vector b;
    std::optional<Vector> x_true;  // present for consistent instances
};

// Seeded generators for the four test regimes:
//   GeneralUniform   entries i.i.d. uniform on [0,1)
//   GeneralGaussian  entries i.i.d. standard normal
//   LowRank          A = U S V^T; S holds the sorted singular values of a fresh
//                    uniform draw with the smallest ceil(k/2) zeroed, k = min(m,n)
//   IllConditioned   same, with the smallest ceil(k/2) set to 0.001
// consistent: b = A x_true with x_true drawn from the kind's base scalar
// distribution (uniform for the two surgery kinds). inconsistent: b = A x_true + z
// with z a unit left-null-space vector — only possible for LowRank, where z is
// taken from the U columns paired with zeroed singular values. Equal specs yield
// bit-identical instances.
Instance generate(const InstanceSpec& spec);

const char* instance_kind_name(InstanceKind k);
InstanceKind parse_instance_kind(const std::string& name);  // throws on unknown names

// Writes <prefix>_A.mtx, <prefix>_b.mtx, <prefix>_x.mtx (consistent only) and a
// <prefix>.json sidecar recording the spec.
void export_instance(const InstanceSpec& spec, const Instance& inst, const std::string& prefix);

}  // namespace ta
