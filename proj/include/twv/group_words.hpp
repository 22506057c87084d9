#pragma once

// Free-group words, finitely presented groups, abelianization maps and
// Fox free differential calculus.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace twv {

struct Generator {
  std::string name;
  int component = 0;  // which link component's meridian this generator is
};

struct Letter {
  int generator = 0;
  int sign = 1;  // +1 or -1

  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

// A freely reduced word in the free group.  The empty word is the identity.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);  // reduces

  static Word generator(int index, int sign = 1);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  Word inverse() const;
  Word prefix(std::size_t length) const;  // first `length` letters; stays reduced

  friend Word operator*(const Word& u, const Word& v);
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

// Cancel adjacent x x^-1 pairs until none remain.
std::vector<Letter> free_reduce(std::vector<Letter> letters);

// Element of the integral group ring Z[F] of the free group.
class GroupRingElement {
 public:
  GroupRingElement() = default;
  explicit GroupRingElement(const Word& w, std::int64_t coefficient = 1);

  static GroupRingElement one() { return GroupRingElement(Word{}); }

  const std::map<Word, std::int64_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::int64_t coefficient(const Word& w) const;

  void add_term(const Word& w, std::int64_t coefficient);

  GroupRingElement& operator+=(const GroupRingElement& o);
  GroupRingElement& operator-=(const GroupRingElement& o);
  friend GroupRingElement operator+(GroupRingElement a, const GroupRingElement& b) { return a += b; }
  friend GroupRingElement operator-(GroupRingElement a, const GroupRingElement& b) { return a -= b; }
  friend GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b);
  friend bool operator==(const GroupRingElement&, const GroupRingElement&) = default;

 private:
  std::map<Word, std::int64_t> terms_;
};

class Presentation {
 public:
  Presentation() = default;
  // Throws InputError on duplicate names, non-contiguous components, or
  // relators referencing undeclared generators.
  Presentation(std::vector<Generator> generators, std::vector<Word> relators);

  const std::vector<Generator>& generators() const { return generators_; }
  const std::vector<Word>& relators() const { return relators_; }
  int generator_count() const { return static_cast<int>(generators_.size()); }
  int relator_count() const { return static_cast<int>(relators_.size()); }
  int component_count() const { return component_count_; }
  int deficiency() const { return generator_count() - relator_count(); }

  // -1 when absent.
  int index_of(const std::string& name) const;

  std::string format(const Word& w) const;

 private:
  std::vector<Generator> generators_;
  std::vector<Word> relators_;
  int component_count_ = 0;
};

// Parses one word: whitespace separated `name`, `name^k` tokens, or a single
// upper-case letter standing for the inverse of its lower-case generator.
Word parse_word(const std::string& text, const std::vector<Generator>& generators);

// Relators may be written `lhs = rhs`, stored as lhs * rhs^-1.  Relators that
// reduce to the identity are dropped with a message appended to `warnings`.
Presentation parse_presentation(const std::vector<Generator>& generators,
                                const std::vector<std::string>& relator_texts,
                                std::vector<std::string>* warnings = nullptr);

// alpha: pi_1 -> Z = <t>, meridian of component l |-> t^{a(l)}.
class AlphaMap {
 public:
  AlphaMap() = default;
  AlphaMap(const Presentation& p, std::vector<int> component_exponents);

  static AlphaMap unit(const Presentation& p);  // a(l) = 1 for every component

  const std::vector<int>& component_exponents() const { return component_exponents_; }
  int generator_exponent(int generator) const { return generator_exponents_.at(generator); }

  // Copy whose generator `generator` maps to t^exponent regardless of its
  // component; used after a Nielsen substitution, where a new generator is
  // a product of meridians.
  AlphaMap with_generator_exponent(int generator, int exponent) const {
    AlphaMap out = *this;
    out.generator_exponents_.at(static_cast<std::size_t>(generator)) = exponent;
    return out;
  }

 private:
  std::vector<int> component_exponents_;
  std::vector<int> generator_exponents_;
};

int alpha_degree(const Word& w, const AlphaMap& alpha);

// Free derivative d w / d x_generator over the free group.
GroupRingElement fox_derivative(const Word& w, int generator);

struct PresentationReport {
  int deficiency = 0;
  int alpha_gcd = 0;
  bool deficiency_ok = false;
  bool surjective = false;
  bool exponents_positive = false;
  std::vector<int> relator_degrees;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

PresentationReport validate_presentation(const Presentation& p, const AlphaMap& alpha);

}  // namespace twv
