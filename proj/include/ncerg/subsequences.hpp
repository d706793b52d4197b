#ifndef NCERG_SUBSEQUENCES_HPP
#define NCERG_SUBSEQUENCES_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ncerg {

// Sparse subsets of N_0 whose complements are used as density-one (or
// counterexample) subsequences.
class SparseRule {
public:
  enum class Kind { None, Evens, Squares, Explicit };

  static SparseRule none() { return SparseRule(Kind::None, {}); }
  static SparseRule evens() { return SparseRule(Kind::Evens, {}); }
  static SparseRule squares() { return SparseRule(Kind::Squares, {}); }
  static SparseRule explicit_set(std::vector<std::uint64_t> sorted_members);

  Kind kind() const { return kind_; }
  const std::vector<std::uint64_t>& members() const { return members_; }

  bool contains(std::uint64_t j) const;

private:
  SparseRule(Kind kind, std::vector<std::uint64_t> members)
      : kind_(kind), members_(std::move(members)) {}
  Kind kind_;
  std::vector<std::uint64_t> members_;
};

// Disjoint integer intervals I_n = [a_n, b_n] with b_n < a_{n+1}.
class IntervalBlocks {
public:
  // I_n = [n^2, n^2 + n]
  static IntervalBlocks squares();
  static IntervalBlocks explicit_list(std::vector<std::pair<std::uint64_t, std::uint64_t>> iv);

  // Endpoints of I_n; throws when an explicit list is exhausted.
  std::pair<std::uint64_t, std::uint64_t> interval(std::size_t n) const;

  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& explicit_intervals() const {
    return explicit_;
  }

private:
  bool squares_ = false;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> explicit_;
};

// Circle-rotation apparatus: X = [0,1) with rotation by alpha, arc Y = [u,v),
// base point omega0. Irrationality of alpha cannot be decided from a double,
// so the flag records an attestation made by the named constructors (or
// explicitly by the user).
struct Apparatus {
  double alpha = 0.0;
  bool alpha_irrational = false;
  std::string alpha_name;  // "golden", "sqrt2m1" or empty for custom values
  double arc_lo = 0.0;
  double arc_hi = 0.0;
  double omega0 = 0.0;

  static Apparatus golden(double arc_lo, double arc_hi, double omega0);
  static Apparatus sqrt2m1(double arc_lo, double arc_hi, double omega0);
  static Apparatus custom(double alpha, bool irrational_attested, double arc_lo, double arc_hi,
                          double omega0);

  void validate() const;
};

double golden_rotation_angle();

struct FullSeq {};
struct ExplicitSeq {
  std::vector<std::uint64_t> terms;  // strictly increasing
};
struct ArithmeticSeq {
  std::uint64_t stride = 1;  // >= 1
  std::uint64_t offset = 0;
};
struct ComplementSeq {
  SparseRule sparse = SparseRule::none();
};
struct BlocksSeq {
  IntervalBlocks intervals;
};
struct RotationSeq {
  Apparatus apparatus;
};

class SubsequenceSpec {
public:
  using Generator =
      std::variant<FullSeq, ExplicitSeq, ArithmeticSeq, ComplementSeq, BlocksSeq, RotationSeq>;

  explicit SubsequenceSpec(Generator g);

  static SubsequenceSpec full() { return SubsequenceSpec(FullSeq{}); }
  static SubsequenceSpec explicit_terms(std::vector<std::uint64_t> terms);
  static SubsequenceSpec arithmetic(std::uint64_t stride, std::uint64_t offset);
  static SubsequenceSpec evens() { return arithmetic(2, 0); }
  static SubsequenceSpec complement(SparseRule sparse);
  static SubsequenceSpec blocks(IntervalBlocks intervals);
  static SubsequenceSpec rotation(Apparatus apparatus);

  const Generator& generator() const { return *gen_; }
  const IntervalBlocks* interval_blocks() const;

  std::vector<std::uint64_t> prefix(std::size_t n) const;

private:
  std::shared_ptr<const Generator> gen_;
};

// Streams k_0 < k_1 < ... one term at a time.
class SequenceCursor {
public:
  explicit SequenceCursor(const SubsequenceSpec& spec);

  std::uint64_t next();

  // Index of the interval containing the last emitted term; only meaningful
  // for block sequences.
  std::uint64_t current_interval_index() const { return interval_index_; }

private:
  struct RotationState {
    Apparatus apparatus;
    double w = 0.0;
    std::uint64_t step = 0;
  };

  std::shared_ptr<const SubsequenceSpec::Generator> gen_;
  std::uint64_t cursor_ = 0;          // generator-specific scan position
  std::uint64_t interval_index_ = 0;  // interval of the last emitted term
  std::uint64_t next_interval_ = 0;
  std::uint64_t interval_hi_ = 0;
  bool interval_open_ = false;
  std::optional<RotationState> rot_;
};

// card({0,...,n} cap k) / (n+1)
double partial_density(const SubsequenceSpec& k, std::uint64_t n);

// min of partial densities over n in [window_start, N]; window_start defaults
// to N/10 to discard small-n transients.
double lower_density_estimate(const SubsequenceSpec& k, std::uint64_t N,
                              std::optional<std::uint64_t> window_start = std::nullopt);

// max_{1<=n<=N} k_n / n
double sup_ratio(const SubsequenceSpec& k, std::uint64_t N);

// c(n) = card(k cap {0,...,n}) = max{j : k_j <= n} + 1
std::uint64_t count_upto(const SubsequenceSpec& k, std::uint64_t n);

struct BlockSequencePrefix {
  std::vector<std::uint64_t> k;
  std::vector<std::uint64_t> interval_index;  // N_I(0), ..., N_I(n-1)
};

// First N terms of the block sequence together with N_I. For the quadratic
// rule I_n = [n^2, n^2 + n] the emitted index is
// N_I(n) = floor((sqrt(8n+1) - 1)/2), the value forced by direct enumeration
// (it grows like sqrt(2n), not like sqrt(n); see README).
BlockSequencePrefix block_sequence(const IntervalBlocks& intervals, std::size_t N);

// First N return times of the rotation orbit to the arc. Rejects apparatuses
// without an irrationality attestation; gives up after 1e9 orbit steps.
std::vector<std::uint64_t> uniform_sequence_from_rotation(const Apparatus& apparatus,
                                                          std::size_t N);

// Increasing enumeration of N_0 minus the sparse set.
std::vector<std::uint64_t> density_one_complement(const SparseRule& sparse, std::size_t N);

}  // namespace ncerg

#endif
