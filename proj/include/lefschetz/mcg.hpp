#pragma once

// Homology-level model of Dehn twists and monodromy factorizations.
//
// Curves are stored by their class in H_1(F; Z) with respect to the symplectic
// basis a_1..a_g, b_1..b_g, plus a genus split for null-homologous
// (separating) curves. The pairing is <x, y> = x^T J y with
// J = [[0, I], [-I, 0]], and a twist of chirality eps acts by the
// transvection x -> x + eps <x, c> c.

#include "lefschetz/exact.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lefschetz {

class WordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WordParseError : public WordError {
 public:
  WordParseError(int line, const std::string& what)
      : WordError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Standard symplectic form of size 2g, templated on the scalar.
template <typename Scalar>
MatrixX<Scalar> standard_symplectic_form(int genus) {
  const Eigen::Index g = genus;
  MatrixX<Scalar> j = MatrixX<Scalar>::Zero(2 * g, 2 * g);
  for (Eigen::Index i = 0; i < g; ++i) {
    j(i, g + i) = Scalar(1);
    j(g + i, i) = Scalar(-1);
  }
  return j;
}

/// x -> x + eps <x, c> c as a matrix. Since <x, c> = x^T J c = (J c) . x,
/// M = I + eps c (J c)^T.
template <typename Scalar, typename DerivedJ, typename DerivedC>
MatrixX<Scalar> transvection(const Eigen::MatrixBase<DerivedJ>& form,
                             const Eigen::MatrixBase<DerivedC>& c, int eps) {
  const Eigen::Index n = form.rows();
  VectorX<Scalar> jc = form.template cast<Scalar>() * c.template cast<Scalar>();
  MatrixX<Scalar> m = MatrixX<Scalar>::Identity(n, n);
  m.noalias() += Scalar(eps) * (c.template cast<Scalar>() * jc.transpose());
  return m;
}

/// M^T J M == J, exactly for exact scalars.
template <typename DerivedM, typename DerivedJ>
bool is_symplectic(const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedJ>& form) {
  if (m.rows() != form.rows() || m.cols() != form.cols()) return false;
  return (m.transpose() * form * m).eval() == form.eval();
}

struct SymplecticSpace {
  int genus = 1;
  IntMatrix form;

  explicit SymplecticSpace(int g);

  Eigen::Index dimension() const { return 2 * static_cast<Eigen::Index>(genus); }
  Integer pairing(const IntVector& x, const IntVector& y) const;
  /// Inverse of a symplectic matrix, -J M^T J.
  IntMatrix symplectic_inverse(const IntMatrix& m) const;
  IntMatrix identity() const { return IntMatrix::Identity(dimension(), dimension()); }
};

/// Simple closed curve, up to what the homology representation sees.
struct Curve {
  IntVector homology;
  /// For a separating curve, the genus h of one side (split (h, g-h)).
  std::optional<int> separating_genus;

  static Curve nonseparating(IntVector homology);
  static Curve separating(int genus, int h);

  bool is_separating() const { return separating_genus.has_value(); }
  friend bool operator==(const Curve& a, const Curve& b) {
    return a.separating_genus == b.separating_genus && a.homology == b.homology;
  }
};

enum class Chirality : int { right = 1, left = -1 };

inline int to_int(Chirality c) { return static_cast<int>(c); }
inline Chirality flipped(Chirality c) {
  return c == Chirality::right ? Chirality::left : Chirality::right;
}

struct TwistLetter {
  Curve curve;
  Chirality chirality = Chirality::right;

  friend bool operator==(const TwistLetter&, const TwistLetter&) = default;
};

struct MonodromyWord {
  int genus = 1;
  std::vector<TwistLetter> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  friend bool operator==(const MonodromyWord&, const MonodromyWord&) = default;
};

/// Throws WordError when a curve is inconsistent with the genus: wrong
/// vector length, non-primitive nonseparating class, nonzero class carrying
/// a separating split, or a split outside 1..g-1.
void check_curve(const SymplecticSpace& space, const Curve& curve);
void check_word(const MonodromyWord& word);

IntMatrix twist_matrix(const SymplecticSpace& space, const TwistLetter& letter);

struct WordMatrices {
  std::vector<IntMatrix> letters;   // M_1 .. M_n
  std::vector<IntMatrix> prefixes;  // P_0 = I, P_j = M_1 ... M_j
  const IntMatrix& product() const { return prefixes.back(); }
};

WordMatrices word_matrices(const SymplecticSpace& space, const MonodromyWord& word);
bool is_identity_factorization(const SymplecticSpace& space, const MonodromyWord& word);

enum class HurwitzDirection { left, right };

/// Elementary Hurwitz move on the adjacent pair (position, position + 1),
/// 0-based. Right: (t_j, t_{j+1}) -> (t_j t_{j+1} t_j^{-1}, t_j).
/// Left is its inverse: (t_j, t_{j+1}) -> (t_{j+1}, t_{j+1}^{-1} t_j t_{j+1}).
/// The conjugated letter is again a twist, along the image class.
MonodromyWord hurwitz_move(const MonodromyWord& word, std::size_t position,
                           HurwitzDirection direction);

/// Orientation reversal: reverse the letters and flip every chirality.
MonodromyWord mirror_word(const MonodromyWord& word);

MonodromyWord concatenate(const MonodromyWord& a, const MonodromyWord& b);

/// Word file format:
///   word g=<g> base=sphere
///   twist <eps> c <2g integers>
///   twist <eps> sep <h>
/// Blank lines and '#' comments are ignored.
MonodromyWord parse_word(std::istream& in);
MonodromyWord load_word(const std::string& path);
std::string format_word(const MonodromyWord& word);
void save_word(const MonodromyWord& word, const std::string& path);

/// 64-bit FNV-1a of the canonical text form, as 16 hex digits.
std::string word_hash(const MonodromyWord& word);

namespace words {

/// Homology classes of the standard chain c_1..c_{2g+1}:
/// a_1, b_1, a_2 - a_1, b_2, ..., a_g - a_{g-1}, b_g, a_g.
std::vector<IntVector> chain_classes(int genus);

/// Right-handed word over the given chain indices (0-based), repeated.
MonodromyWord chain_word(int genus, const std::vector<int>& chain_indices, int repeat);

/// Elliptic surface E(n): (t_a t_b)^{6n} in genus 1.
MonodromyWord elliptic_surface(int n);

/// (t_1 ... t_{2g+1})^{2g+2}.
MonodromyWord odd_chain_relation(int genus);

/// (t_1 t_2 ... t_{2g+1} t_{2g+1} ... t_2 t_1)^2.
MonodromyWord hyperelliptic_involution_relation(int genus);

/// Genus-2 word (t_{a1} t_{b1})^6 t_sep^{-1}: the one-holed torus chain
/// relation closed up by a left-handed twist on the (1,1) separating curve.
MonodromyWord separating_achiral_relation();

}  // namespace words

}  // namespace lefschetz
