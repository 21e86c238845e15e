#include "lefschetz/mcg.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lefschetz {

SymplecticSpace::SymplecticSpace(int g) : genus(g) {
  if (g < 1) throw WordError("genus must be >= 1, got " + std::to_string(g));
  form = standard_symplectic_form<Integer>(g);
}

Integer SymplecticSpace::pairing(const IntVector& x, const IntVector& y) const {
  return x.dot(form * y);
}

IntMatrix SymplecticSpace::symplectic_inverse(const IntMatrix& m) const {
  return -(form * m.transpose() * form);
}

Curve Curve::nonseparating(IntVector homology) {
  return Curve{std::move(homology), std::nullopt};
}

Curve Curve::separating(int genus, int h) {
  return Curve{IntVector::Zero(2 * genus), h};
}

void check_curve(const SymplecticSpace& space, const Curve& curve) {
  if (curve.homology.size() != space.dimension()) {
    throw WordError("curve class has length " + std::to_string(curve.homology.size()) +
                    ", expected " + std::to_string(space.dimension()));
  }
  const bool zero = curve.homology.isZero();
  if (curve.is_separating()) {
    if (!zero) throw WordError("separating curve must have zero homology class");
    const int h = *curve.separating_genus;
    if (h < 1 || h > space.genus - 1) {
      throw WordError("separating split h=" + std::to_string(h) + " outside 1.." +
                      std::to_string(space.genus - 1));
    }
    return;
  }
  if (zero) throw WordError("nonseparating curve has zero homology class");
  Integer d = 0;
  for (Eigen::Index i = 0; i < curve.homology.size(); ++i) {
    d = gcd(d, abs(curve.homology(i)));
  }
  if (d != 1) throw WordError("nonseparating class is not primitive (gcd " + d.str() + ")");
}

void check_word(const MonodromyWord& word) {
  const SymplecticSpace space(word.genus);
  for (const auto& letter : word.letters) check_curve(space, letter.curve);
}

IntMatrix twist_matrix(const SymplecticSpace& space, const TwistLetter& letter) {
  check_curve(space, letter.curve);
  if (letter.curve.is_separating()) return space.identity();
  return transvection<Integer>(space.form, letter.curve.homology, to_int(letter.chirality));
}

WordMatrices word_matrices(const SymplecticSpace& space, const MonodromyWord& word) {
  WordMatrices out;
  out.letters.reserve(word.size());
  out.prefixes.reserve(word.size() + 1);
  out.prefixes.push_back(space.identity());
  for (const auto& letter : word.letters) {
    out.letters.push_back(twist_matrix(space, letter));
    out.prefixes.push_back(out.prefixes.back() * out.letters.back());
  }
  return out;
}

bool is_identity_factorization(const SymplecticSpace& space, const MonodromyWord& word) {
  if (word.genus != space.genus) return false;
  return word_matrices(space, word).product() == space.identity();
}

MonodromyWord hurwitz_move(const MonodromyWord& word, std::size_t position,
                           HurwitzDirection direction) {
  if (word.size() < 2 || position + 1 >= word.size()) {
    throw WordError("Hurwitz move position " + std::to_string(position) +
                    " out of range for a word of length " + std::to_string(word.size()));
  }
  const SymplecticSpace space(word.genus);
  MonodromyWord out = word;
  const TwistLetter& first = word.letters[position];
  const TwistLetter& second = word.letters[position + 1];

  // Conjugating a twist along c by M gives the twist along M c.
  auto conjugate = [&](const TwistLetter& letter, const IntMatrix& m) {
    TwistLetter moved = letter;
    if (!letter.curve.is_separating()) moved.curve.homology = m * letter.curve.homology;
    return moved;
  };

  if (direction == HurwitzDirection::right) {
    out.letters[position] = conjugate(second, twist_matrix(space, first));
    out.letters[position + 1] = first;
  } else {
    const IntMatrix inv = space.symplectic_inverse(twist_matrix(space, second));
    out.letters[position] = second;
    out.letters[position + 1] = conjugate(first, inv);
  }
  return out;
}

MonodromyWord mirror_word(const MonodromyWord& word) {
  MonodromyWord out{word.genus, {}};
  out.letters.reserve(word.size());
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
    out.letters.push_back(TwistLetter{it->curve, flipped(it->chirality)});
  }
  return out;
}

MonodromyWord concatenate(const MonodromyWord& a, const MonodromyWord& b) {
  if (a.genus != b.genus) throw WordError("cannot concatenate words of different genus");
  MonodromyWord out = a;
  out.letters.insert(out.letters.end(), b.letters.begin(), b.letters.end());
  return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_int(const std::string& tok, long long& out) {
  if (tok.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stoll(tok, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == tok.size();
}

bool parse_integer(const std::string& tok, Integer& out) {
  std::string digits = tok;
  if (!digits.empty() && digits[0] == '+') digits.erase(0, 1);
  if (digits.empty() || digits == "-") return false;
  for (std::size_t i = (digits[0] == '-' ? 1 : 0); i < digits.size(); ++i) {
    if (digits[i] < '0' || digits[i] > '9') return false;
  }
  out = Integer(digits);
  return true;
}

}  // namespace

MonodromyWord parse_word(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::optional<MonodromyWord> word;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(strip_comment(line));
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!word) {
      if (tok.size() != 3 || tok[0] != "word" || tok[1].rfind("g=", 0) != 0 ||
          tok[2] != "base=sphere") {
        throw WordParseError(line_no, "expected header 'word g=<g> base=sphere'");
      }
      long long g = 0;
      if (!parse_int(tok[1].substr(2), g) || g < 1) {
        throw WordParseError(line_no, "bad genus '" + tok[1] + "'");
      }
      word = MonodromyWord{static_cast<int>(g), {}};
      continue;
    }

    if (tok[0] != "twist" || tok.size() < 3) {
      throw WordParseError(line_no, "expected 'twist <eps> c ...' or 'twist <eps> sep <h>'");
    }
    long long eps = 0;
    if (!parse_int(tok[1], eps) || (eps != 1 && eps != -1)) {
      throw WordParseError(line_no, "chirality must be +1 or -1, got '" + tok[1] + "'");
    }
    const Chirality chirality = eps > 0 ? Chirality::right : Chirality::left;
    const SymplecticSpace space(word->genus);

    Curve curve;
    if (tok[2] == "c") {
      const auto n = static_cast<std::size_t>(space.dimension());
      if (tok.size() != 3 + n) {
        throw WordParseError(line_no, "expected " + std::to_string(n) + " integers after 'c'");
      }
      IntVector v(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        if (!parse_integer(tok[3 + i], v(static_cast<Eigen::Index>(i)))) {
          throw WordParseError(line_no, "not an integer: '" + tok[3 + i] + "'");
        }
      }
      curve = Curve::nonseparating(std::move(v));
    } else if (tok[2] == "sep") {
      long long h = 0;
      if (tok.size() != 4 || !parse_int(tok[3], h)) {
        throw WordParseError(line_no, "expected 'sep <h>'");
      }
      curve = Curve::separating(word->genus, static_cast<int>(h));
    } else {
      throw WordParseError(line_no, "unknown curve kind '" + tok[2] + "'");
    }
    try {
      check_curve(space, curve);
    } catch (const WordError& e) {
      throw WordParseError(line_no, e.what());
    }
    word->letters.push_back(TwistLetter{std::move(curve), chirality});
  }
  if (!word) throw WordParseError(line_no + 1, "missing header 'word g=<g> base=sphere'");
  return *word;
}

MonodromyWord load_word(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw WordError("cannot open word file '" + path + "'");
  return parse_word(in);
}

std::string format_word(const MonodromyWord& word) {
  std::ostringstream out;
  out << "word g=" << word.genus << " base=sphere\n";
  for (const auto& letter : word.letters) {
    out << "twist " << (letter.chirality == Chirality::right ? "+1" : "-1");
    if (letter.curve.is_separating()) {
      out << " sep " << *letter.curve.separating_genus;
    } else {
      out << " c";
      for (Eigen::Index i = 0; i < letter.curve.homology.size(); ++i) {
        out << ' ' << letter.curve.homology(i).str();
      }
    }
    out << '\n';
  }
  return out.str();
}

void save_word(const MonodromyWord& word, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw WordError("cannot write word file '" + path + "'");
  out << format_word(word);
}

std::string word_hash(const MonodromyWord& word) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : format_word(word)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

// ---------------------------------------------------------------------------
// Standard relations

namespace words {

std::vector<IntVector> chain_classes(int genus) {
  const Eigen::Index g = genus;
  auto a = [&](Eigen::Index i) {
    IntVector v = IntVector::Zero(2 * g);
    v(i) = 1;
    return v;
  };
  auto b = [&](Eigen::Index i) {
    IntVector v = IntVector::Zero(2 * g);
    v(g + i) = 1;
    return v;
  };
  std::vector<IntVector> out;
  out.push_back(a(0));
  out.push_back(b(0));
  for (Eigen::Index i = 1; i < g; ++i) {
    out.push_back(a(i) - a(i - 1));
    out.push_back(b(i));
  }
  out.push_back(a(g - 1));
  return out;
}

MonodromyWord chain_word(int genus, const std::vector<int>& chain_indices, int repeat) {
  const auto classes = chain_classes(genus);
  MonodromyWord w{genus, {}};
  for (int r = 0; r < repeat; ++r) {
    for (int idx : chain_indices) {
      w.letters.push_back(
          TwistLetter{Curve::nonseparating(classes.at(static_cast<std::size_t>(idx))),
                      Chirality::right});
    }
  }
  return w;
}

MonodromyWord elliptic_surface(int n) { return chain_word(1, {0, 1}, 6 * n); }

MonodromyWord odd_chain_relation(int genus) {
  std::vector<int> idx;
  for (int i = 0; i < 2 * genus + 1; ++i) idx.push_back(i);
  return chain_word(genus, idx, 2 * genus + 2);
}

MonodromyWord hyperelliptic_involution_relation(int genus) {
  std::vector<int> idx;
  for (int i = 0; i < 2 * genus + 1; ++i) idx.push_back(i);
  for (int i = 2 * genus; i >= 0; --i) idx.push_back(i);
  return chain_word(genus, idx, 2);
}

MonodromyWord separating_achiral_relation() {
  MonodromyWord w = chain_word(2, {0, 1}, 6);
  w.letters.push_back(TwistLetter{Curve::separating(2, 1), Chirality::left});
  return w;
}

}  // namespace words

}  // namespace lefschetz
