#include "ncerg/subsequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncerg {

namespace {
constexpr double kArcSlack = 1e-12;
constexpr std::uint64_t kOrbitCap = 1000000000ULL;

bool is_perfect_square(std::uint64_t j) {
  const auto r = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(j))));
  for (std::uint64_t s = (r > 0 ? r - 1 : 0); s <= r + 1; ++s)
    if (s * s == j) return true;
  return false;
}

bool in_arc(const Apparatus& ap, double w) {
  return w >= ap.arc_lo - kArcSlack && w < ap.arc_hi;
}
}  // namespace

SparseRule SparseRule::explicit_set(std::vector<std::uint64_t> sorted_members) {
  for (std::size_t i = 1; i < sorted_members.size(); ++i)
    if (sorted_members[i] <= sorted_members[i - 1])
      throw std::invalid_argument("SparseRule: members must be strictly increasing");
  return SparseRule(Kind::Explicit, std::move(sorted_members));
}

bool SparseRule::contains(std::uint64_t j) const {
  switch (kind_) {
    case Kind::None:
      return false;
    case Kind::Evens:
      return j % 2 == 0;
    case Kind::Squares:
      return is_perfect_square(j);
    case Kind::Explicit:
      return std::binary_search(members_.begin(), members_.end(), j);
  }
  return false;
}

IntervalBlocks IntervalBlocks::squares() {
  IntervalBlocks b;
  b.squares_ = true;
  return b;
}

IntervalBlocks IntervalBlocks::explicit_list(
    std::vector<std::pair<std::uint64_t, std::uint64_t>> iv) {
  if (iv.empty()) throw std::invalid_argument("IntervalBlocks: empty interval list");
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (iv[i].second < iv[i].first)
      throw std::invalid_argument("IntervalBlocks: interval with b_n < a_n");
    if (i > 0 && iv[i].first <= iv[i - 1].second)
      throw std::invalid_argument("IntervalBlocks: intervals must satisfy b_n < a_{n+1}");
  }
  IntervalBlocks b;
  b.explicit_ = std::move(iv);
  return b;
}

std::pair<std::uint64_t, std::uint64_t> IntervalBlocks::interval(std::size_t n) const {
  if (squares_) {
    const std::uint64_t m = n;
    return {m * m, m * m + m};
  }
  if (n >= explicit_.size())
    throw std::invalid_argument("IntervalBlocks: interval list exhausted");
  return explicit_[n];
}

double golden_rotation_angle() { return (std::sqrt(5.0) - 1.0) / 2.0; }

Apparatus Apparatus::golden(double arc_lo, double arc_hi, double omega0) {
  Apparatus a;
  a.alpha = golden_rotation_angle();
  a.alpha_irrational = true;
  a.alpha_name = "golden";
  a.arc_lo = arc_lo;
  a.arc_hi = arc_hi;
  a.omega0 = omega0;
  a.validate();
  return a;
}

Apparatus Apparatus::sqrt2m1(double arc_lo, double arc_hi, double omega0) {
  Apparatus a;
  a.alpha = std::sqrt(2.0) - 1.0;
  a.alpha_irrational = true;
  a.alpha_name = "sqrt2m1";
  a.arc_lo = arc_lo;
  a.arc_hi = arc_hi;
  a.omega0 = omega0;
  a.validate();
  return a;
}

Apparatus Apparatus::custom(double alpha, bool irrational_attested, double arc_lo, double arc_hi,
                            double omega0) {
  Apparatus a;
  a.alpha = alpha;
  a.alpha_irrational = irrational_attested;
  a.arc_lo = arc_lo;
  a.arc_hi = arc_hi;
  a.omega0 = omega0;
  a.validate();
  return a;
}

void Apparatus::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("apparatus: rotation angle must lie in (0,1)");
  if (!alpha_irrational)
    throw std::invalid_argument(
        "apparatus: rotation angle carries no irrationality attestation (rational angles are "
        "rejected)");
  if (!(arc_lo >= 0.0 && arc_lo < arc_hi && arc_hi <= 1.0))
    throw std::invalid_argument("apparatus: arc must satisfy 0 <= u < v <= 1");
  if (!(omega0 >= 0.0 && omega0 < 1.0))
    throw std::invalid_argument("apparatus: base point must lie in [0,1)");
}

SubsequenceSpec::SubsequenceSpec(Generator g)
    : gen_(std::make_shared<const Generator>(std::move(g))) {
  if (std::holds_alternative<ExplicitSeq>(*gen_)) {
    const auto& terms = std::get<ExplicitSeq>(*gen_).terms;
    if (terms.empty()) throw std::invalid_argument("SubsequenceSpec: empty explicit sequence");
    for (std::size_t i = 1; i < terms.size(); ++i)
      if (terms[i] <= terms[i - 1])
        throw std::invalid_argument("SubsequenceSpec: terms must be strictly increasing");
  } else if (std::holds_alternative<ArithmeticSeq>(*gen_)) {
    if (std::get<ArithmeticSeq>(*gen_).stride < 1)
      throw std::invalid_argument("SubsequenceSpec: stride must be >= 1");
  } else if (std::holds_alternative<RotationSeq>(*gen_)) {
    std::get<RotationSeq>(*gen_).apparatus.validate();
  }
}

SubsequenceSpec SubsequenceSpec::explicit_terms(std::vector<std::uint64_t> terms) {
  return SubsequenceSpec(ExplicitSeq{std::move(terms)});
}

SubsequenceSpec SubsequenceSpec::arithmetic(std::uint64_t stride, std::uint64_t offset) {
  return SubsequenceSpec(ArithmeticSeq{stride, offset});
}

SubsequenceSpec SubsequenceSpec::complement(SparseRule sparse) {
  return SubsequenceSpec(ComplementSeq{std::move(sparse)});
}

SubsequenceSpec SubsequenceSpec::blocks(IntervalBlocks intervals) {
  return SubsequenceSpec(BlocksSeq{std::move(intervals)});
}

SubsequenceSpec SubsequenceSpec::rotation(Apparatus apparatus) {
  return SubsequenceSpec(RotationSeq{std::move(apparatus)});
}

const IntervalBlocks* SubsequenceSpec::interval_blocks() const {
  if (const auto* b = std::get_if<BlocksSeq>(gen_.get())) return &b->intervals;
  return nullptr;
}

std::vector<std::uint64_t> SubsequenceSpec::prefix(std::size_t n) const {
  SequenceCursor cur(*this);
  std::vector<std::uint64_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(cur.next());
  return out;
}

SequenceCursor::SequenceCursor(const SubsequenceSpec& spec)
    : gen_(std::make_shared<const SubsequenceSpec::Generator>(spec.generator())) {
  if (const auto* r = std::get_if<RotationSeq>(gen_.get()))
    rot_ = RotationState{r->apparatus, r->apparatus.omega0, 0};
}

std::uint64_t SequenceCursor::next() {
  struct Visitor {
    SequenceCursor& c;

    std::uint64_t operator()(const FullSeq&) { return c.cursor_++; }

    std::uint64_t operator()(const ExplicitSeq& s) {
      if (c.cursor_ >= s.terms.size())
        throw std::invalid_argument("sequence prefix exhausted: explicit list too short");
      return s.terms[c.cursor_++];
    }

    std::uint64_t operator()(const ArithmeticSeq& s) {
      return s.offset + s.stride * c.cursor_++;
    }

    std::uint64_t operator()(const ComplementSeq& s) {
      for (;;) {
        const std::uint64_t j = c.cursor_++;
        if (!s.sparse.contains(j)) return j;
      }
    }

    std::uint64_t operator()(const BlocksSeq& s) {
      if (!c.interval_open_) {
        const auto [a, b] = s.intervals.interval(c.next_interval_);
        c.cursor_ = a;
        c.interval_hi_ = b;
        c.interval_open_ = true;
      }
      const std::uint64_t k = c.cursor_;
      c.interval_index_ = c.next_interval_;
      if (c.cursor_ == c.interval_hi_) {
        c.interval_open_ = false;
        ++c.next_interval_;
      } else {
        ++c.cursor_;
      }
      return k;
    }

    std::uint64_t operator()(const RotationSeq&) {
      auto& st = *c.rot_;
      for (;;) {
        if (st.step >= kOrbitCap)
          throw std::runtime_error("rotation return times: orbit step cap (1e9) exceeded");
        const std::uint64_t k = st.step;
        const double w = st.w;
        ++st.step;
        st.w += st.apparatus.alpha;
        if (st.w >= 1.0) st.w -= 1.0;
        if ((st.step & 0xFFFF) == 0) st.w = std::fmod(st.w, 1.0);
        if (in_arc(st.apparatus, w)) return k;
      }
    }
  };

  return std::visit(Visitor{*this}, *gen_);
}

double partial_density(const SubsequenceSpec& k, std::uint64_t n) {
  SequenceCursor cur(k);
  std::uint64_t count = 0;
  for (;;) {
    std::uint64_t term;
    try {
      term = cur.next();
    } catch (const std::invalid_argument&) {
      break;  // explicit list exhausted: all remaining terms exceed n
    }
    if (term > n) break;
    ++count;
  }
  return static_cast<double>(count) / static_cast<double>(n + 1);
}

double lower_density_estimate(const SubsequenceSpec& k, std::uint64_t N,
                              std::optional<std::uint64_t> window_start) {
  const std::uint64_t start = window_start.value_or(N / 10);
  SequenceCursor cur(k);
  std::uint64_t count = 0;
  double lowest = std::numeric_limits<double>::infinity();
  std::uint64_t term = 0;
  bool exhausted = false;
  try {
    term = cur.next();
  } catch (const std::invalid_argument&) {
    exhausted = true;
  }
  for (std::uint64_t n = 0; n <= N; ++n) {
    while (!exhausted && term <= n) {
      ++count;
      try {
        term = cur.next();
      } catch (const std::invalid_argument&) {
        exhausted = true;
      }
    }
    if (n >= start)
      lowest = std::min(lowest, static_cast<double>(count) / static_cast<double>(n + 1));
  }
  return lowest;
}

double sup_ratio(const SubsequenceSpec& k, std::uint64_t N) {
  if (N < 1) throw std::invalid_argument("sup_ratio: N must be >= 1");
  SequenceCursor cur(k);
  cur.next();  // k_0 is not used by the ratio
  double best = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const double ratio = static_cast<double>(cur.next()) / static_cast<double>(n);
    best = std::max(best, ratio);
  }
  return best;
}

std::uint64_t count_upto(const SubsequenceSpec& k, std::uint64_t n) {
  SequenceCursor cur(k);
  std::uint64_t count = 0;
  for (;;) {
    std::uint64_t term;
    try {
      term = cur.next();
    } catch (const std::invalid_argument&) {
      break;
    }
    if (term > n) break;
    ++count;
  }
  return count;
}

BlockSequencePrefix block_sequence(const IntervalBlocks& intervals, std::size_t N) {
  if (N < 1) throw std::invalid_argument("block_sequence: N must be >= 1");
  BlockSequencePrefix out;
  out.k.reserve(N);
  out.interval_index.reserve(N);
  std::size_t m = 0;
  while (out.k.size() < N) {
    const auto [a, b] = intervals.interval(m);
    for (std::uint64_t v = a; v <= b && out.k.size() < N; ++v) {
      out.k.push_back(v);
      out.interval_index.push_back(m);
    }
    ++m;
  }
  return out;
}

std::vector<std::uint64_t> uniform_sequence_from_rotation(const Apparatus& apparatus,
                                                          std::size_t N) {
  if (N < 1) throw std::invalid_argument("uniform_sequence_from_rotation: N must be >= 1");
  apparatus.validate();
  return SubsequenceSpec::rotation(apparatus).prefix(N);
}

std::vector<std::uint64_t> density_one_complement(const SparseRule& sparse, std::size_t N) {
  return SubsequenceSpec::complement(sparse).prefix(N);
}

}  // namespace ncerg
