#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tracial/smith.hpp"

namespace tracial {

/// Z^rank + Z/d_1 + ... with d_1 | d_2 | ... and every d_i >= 2. Generators
/// are ordered free first, then torsion in the order of the divisors.
struct FGAbelianGroup {
  int rank = 0;
  std::vector<BigInt> torsion;

  int generators() const { return rank + static_cast<int>(torsion.size()); }
  bool trivial() const { return rank == 0 && torsion.empty(); }
  bool free() const { return torsion.empty(); }
  bool operator==(const FGAbelianGroup&) const = default;
};

/// Elementwise equality; Eigen's operator== trips cpp_int's converting
/// constructors.
bool equal(const BigMatrix& a, const BigMatrix& b);
/// Plain triple-loop product, for the same reason.
BigMatrix multiply(const BigMatrix& a, const BigMatrix& b);

FGAbelianGroup free_group(int rank);
/// Canonical form of Z^generators / (column span of relations).
FGAbelianGroup group_from_presentation(const BigMatrix& relations);
/// n x k relation matrix of the canonical generators.
BigMatrix relation_matrix(const FGAbelianGroup& g);
FGAbelianGroup direct_sum(const FGAbelianGroup& a, const FGAbelianGroup& b);

/// Matrix on canonical generators; rows landing in torsion are reduced mod
/// the divisor.
struct GroupHom {
  FGAbelianGroup domain, codomain;
  BigMatrix matrix;
};

/// Validates shape and that relations map into relations.
GroupHom make_hom(FGAbelianGroup domain, FGAbelianGroup codomain, BigMatrix matrix);
GroupHom identity_hom(const FGAbelianGroup& g);
GroupHom zero_hom(const FGAbelianGroup& domain, const FGAbelianGroup& codomain);
/// 1 - a on an endomorphism.
GroupHom one_minus(const GroupHom& a);

struct KernelCokernel {
  FGAbelianGroup kernel, cokernel;
};

KernelCokernel kernel_cokernel(const GroupHom& f);

/// 0 -> coker(1 - a_i) -> K_i -> ker(1 - a_{1-i}) -> 0 for each i.
struct PVDegree {
  FGAbelianGroup sub, quotient;
  bool split = false;                  // quotient free or sub trivial, so K_i = sub + quotient
  std::optional<FGAbelianGroup> group;  // set when split
};

struct PVResult {
  PVDegree k0, k1;
  std::optional<std::string> order_note;
};

PVResult pv_crossed_kgroups(const FGAbelianGroup& K0, const FGAbelianGroup& K1, const GroupHom& a0,
                            const GroupHom& a1);

/// "Z^2 + Z/2 + Z/4", "Z", "0". Input must already be canonical.
FGAbelianGroup parse_group(const std::string& text);
std::string to_string(const FGAbelianGroup& g);
/// "[[1,-1],[-1,1]]"; "[]" for an empty matrix. rows/cols give the shape
/// when the text is "[]".
BigMatrix parse_matrix(const std::string& text, Eigen::Index rows = 0, Eigen::Index cols = 0);
std::string to_string(const BigMatrix& m);
/// "K0 = Z, K1 = Z"; unsplit degrees print as "ext(sub, quotient)".
std::string to_string(const PVResult& r);

}  // namespace tracial
