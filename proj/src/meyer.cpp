#include "lefschetz/meyer.hpp"

#include <json.hpp>

#include <sstream>

namespace lefschetz {

namespace {

void require_symplectic(const SymplecticSpace& space, const IntMatrix& m, const char* name) {
  if (!is_symplectic(m, space.form)) {
    throw WordError(std::string("matrix ") + name + " is not symplectic");
  }
}

}  // namespace

RationalSymmetricForm meyer_form(const SymplecticSpace& space, const IntMatrix& a,
                                 const IntMatrix& b) {
  require_symplectic(space, a, "A");
  require_symplectic(space, b, "B");
  const Eigen::Index n = space.dimension();
  const RatMatrix id = RatMatrix::Identity(n, n);
  const RatMatrix a_inv = space.symplectic_inverse(a).cast<Rational>();
  const RatMatrix b_q = b.cast<Rational>();
  const RatMatrix j = space.form.cast<Rational>();

  RatMatrix constraint(n, 2 * n);
  constraint << a_inv - id, b_q - id;
  const RatMatrix basis = null_space(constraint);  // columns are (x; y)
  const Eigen::Index dim = basis.cols();
  if (dim == 0) return RationalSymmetricForm{RatMatrix(0, 0)};

  const RatMatrix sums = basis.topRows(n) + basis.bottomRows(n);          // x + y
  const RatMatrix images = j * (id - b_q) * basis.bottomRows(n);          // J (I - B) y
  const RatMatrix gram = sums.transpose() * images;
  RatMatrix sym = (gram + gram.transpose()) / Rational(2);
  return RationalSymmetricForm{std::move(sym)};
}

int meyer_tau(const SymplecticSpace& space, const IntMatrix& a, const IntMatrix& b) {
  return meyer_form(space, a, b).signature();
}

int cocycle_defect(const SymplecticSpace& space, const IntMatrix& a, const IntMatrix& b,
                   const IntMatrix& c) {
  const IntMatrix ab = a * b;
  const IntMatrix bc = b * c;
  return meyer_tau(space, a, b) + meyer_tau(space, ab, c) - meyer_tau(space, a, bc) -
         meyer_tau(space, b, c);
}

bool conjugation_invariance(const SymplecticSpace& space, const IntMatrix& a,
                            const IntMatrix& b, const IntMatrix& c) {
  require_symplectic(space, c, "C");
  const IntMatrix c_inv = space.symplectic_inverse(c);
  const IntMatrix ca = c * a * c_inv;
  const IntMatrix cb = c * b * c_inv;
  return meyer_tau(space, ca, cb) == meyer_tau(space, a, b);
}

int local_signature(const TwistLetter& letter) {
  if (!letter.curve.is_separating()) return 0;
  return letter.chirality == Chirality::right ? -1 : 1;
}

SignatureReport fibration_signature(const SymplecticSpace& space, const MonodromyWord& word) {
  if (word.genus != space.genus) {
    throw WordError("word genus " + std::to_string(word.genus) + " does not match space genus " +
                    std::to_string(space.genus));
  }
  const WordMatrices mats = word_matrices(space, word);
  if (mats.product() != space.identity()) {
    throw NotAFactorizationError(mats.product(),
                                 "monodromy word does not multiply to the identity");
  }

  SignatureReport r;
  for (std::size_t j = 1; j < word.size(); ++j) {
    r.meyer_sum += meyer_tau(space, mats.prefixes[j], mats.letters[j]);
  }
  for (const auto& letter : word.letters) {
    r.local_sum += local_signature(letter);
    const bool right = letter.chirality == Chirality::right;
    (right ? r.n_plus : r.n_minus) += 1;
    if (letter.curve.is_separating()) (right ? r.n_sep_plus : r.n_sep_minus) += 1;
  }
  r.sigma = kMeyerSign * r.meyer_sum + r.local_sum;
  r.delta_pairing = r.n_plus - r.n_minus;
  r.c1_pairing = Rational(r.sigma + r.delta_pairing, 4);
  return r;
}

PairingReport pairing_report(const SignatureReport& report) {
  PairingReport p;
  p.delta = report.n_plus - report.n_minus;
  p.c1 = Rational(report.sigma + p.delta, 4);
  p.sigma_hat_check = Rational(report.sigma) == 4 * p.c1 - p.delta &&
                      p.c1 == report.c1_pairing && p.delta == report.delta_pairing;
  p.smith_applicable = report.n_minus == 0;
  if (p.smith_applicable) {
    p.smith_check = Rational(report.sigma) == 4 * p.c1 - report.n_plus;
  }
  return p;
}

std::string report_json(const SignatureReport& report, const MonodromyWord& word) {
  nlohmann::ordered_json j;
  j["sigma"] = report.sigma;
  j["meyer_sum"] = report.meyer_sum;
  j["local_sum"] = report.local_sum;
  j["n_plus"] = report.n_plus;
  j["n_minus"] = report.n_minus;
  j["n_sep_plus"] = report.n_sep_plus;
  j["n_sep_minus"] = report.n_sep_minus;
  j["c1_pairing"] = to_fraction_string(report.c1_pairing);
  j["delta_pairing"] = report.delta_pairing;
  j["word_hash"] = word_hash(word);
  return j.dump(2) + "\n";
}

}  // namespace lefschetz
