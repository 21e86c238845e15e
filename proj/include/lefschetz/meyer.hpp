#pragma once

// Meyer signature cocycle on Sp(2g, Z) and signatures of achiral Lefschetz
// fibrations over the sphere. All arithmetic is exact.

#include "lefschetz/exact.hpp"
#include "lefschetz/mcg.hpp"

#include <string>

namespace lefschetz {

/// Exact symmetric bilinear form over Q.
struct RationalSymmetricForm {
  RatMatrix entries;

  Eigen::Index dimension() const { return entries.rows(); }
  Inertia inertia() const { return symmetric_inertia(entries); }
  int signature() const { return inertia().signature(); }
};

/// The form whose signature is tau(A, B): on
///   V = {(x, y) : (A^{-1} - I) x + (B - I) y = 0} in Q^{2g} x Q^{2g}
/// take q((x1, y1), (x2, y2)) = (x1 + y1)^T J (I - B) y2, symmetrized and
/// written in a basis of V.
RationalSymmetricForm meyer_form(const SymplecticSpace& space, const IntMatrix& a,
                                 const IntMatrix& b);

/// Throws WordError on non-symplectic input.
int meyer_tau(const SymplecticSpace& space, const IntMatrix& a, const IntMatrix& b);

/// tau(A,B) + tau(AB,C) - tau(A,BC) - tau(B,C); zero for a cocycle.
int cocycle_defect(const SymplecticSpace& space, const IntMatrix& a, const IntMatrix& b,
                   const IntMatrix& c);

/// tau(C A C^{-1}, C B C^{-1}) == tau(A, B).
bool conjugation_invariance(const SymplecticSpace& space, const IntMatrix& a,
                            const IntMatrix& b, const IntMatrix& c);

/// Sign applied to the Meyer sum so that the rational elliptic surface
/// (t_a t_b)^6 has signature -8 under this module's twist convention.
inline constexpr int kMeyerSign = 1;

/// Signature contribution of a singular-fiber neighborhood.
///
/// Nonseparating vanishing cycle: the neighborhood's second homology is
/// spanned by the fiber class, [F]^2 = 0, so the form is (0).
/// Separating vanishing cycle: the singular fiber has two components E1, E2
/// meeting once, with E1 + E2 = [F]. In the chiral case E_i^2 = -1 and the
/// form is [[-1, 1], [1, -1]] (eigenvalues 0, -2), contributing -1. The
/// achiral node reverses the local orientation, flipping the form and the
/// contribution to +1.
int local_signature(const TwistLetter& letter);

struct SignatureReport {
  int sigma = 0;
  int meyer_sum = 0;
  int local_sum = 0;
  int n_plus = 0;
  int n_minus = 0;
  int n_sep_plus = 0;
  int n_sep_minus = 0;
  Rational c1_pairing = 0;
  int delta_pairing = 0;

  friend bool operator==(const SignatureReport&, const SignatureReport&) = default;
};

class NotAFactorizationError : public WordError {
 public:
  NotAFactorizationError(IntMatrix product, const std::string& what)
      : WordError(what), product_(std::move(product)) {}
  const IntMatrix& product() const { return product_; }

 private:
  IntMatrix product_;
};

/// sigma = kMeyerSign * sum_{j=1}^{n-1} tau(P_j, M_{j+1}) + sum of local terms.
/// Throws NotAFactorizationError unless the word multiplies to the identity.
SignatureReport fibration_signature(const SymplecticSpace& space, const MonodromyWord& word);

struct PairingReport {
  Rational c1;
  int delta = 0;
  /// sigma == 4 c1 - delta.
  bool sigma_hat_check = false;
  /// Only meaningful for all-chiral words: sigma == 4 c1 - (letter count).
  bool smith_applicable = false;
  bool smith_check = false;
};

PairingReport pairing_report(const SignatureReport& report);

/// JSON text with the report fields, c1_pairing as "p/q", and the word hash.
std::string report_json(const SignatureReport& report, const MonodromyWord& word);

}  // namespace lefschetz
