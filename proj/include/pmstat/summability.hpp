#pragma once

// Non-negative summability matrices, index sets, ideals on N, A-densities and
// A^I-densities at a finite horizon.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pmstat {

/// a_nk = weight for first <= k <= last. Segments of one row may overlap, in
/// which case their weights add up.
struct RowSegment {
    std::size_t first = 1;
    std::size_t last = 1;
    double weight = 0.0;
};

class SummMatrix {
public:
    using RowFn = std::function<std::vector<RowSegment>(std::size_t n)>;

    SummMatrix(std::string name, RowFn rows);

    const std::string& name() const { return name_; }

    /// Row n (1-based); validated: 1 <= first <= last, weight >= 0.
    std::vector<RowSegment> row(std::size_t n) const;
    double entry(std::size_t n, std::size_t k) const;
    double row_sum(std::size_t n) const;
    /// Largest column index with a possibly non-zero entry in row n.
    std::size_t support_bound(std::size_t n) const;

    /// Cesaro means C1: a_nk = 1/n for k <= n.
    static SummMatrix cesaro();
    static SummMatrix identity();
    /// Uniform weights over the window (n - ceil(n^theta), n], 0 < theta < 1.
    static SummMatrix block(double theta);
    /// Half of each row spread over 1..n, half on the largest square <= n.
    static SummMatrix squares_weighted();
    /// a_n1 = 1 for every n; violates the column condition.
    static SummMatrix constant_column();
    /// Explicit rows 1..rows.size(); rows beyond that raise std::out_of_range.
    static SummMatrix from_rows(std::string name, std::vector<std::vector<RowSegment>> rows);

private:
    std::string name_;
    RowFn rows_;
};

/// A subset of N = {1, 2, ...} given by a membership predicate.
class IndexSet {
public:
    using Pred = std::function<bool(std::size_t)>;

    IndexSet(std::string name, Pred pred) : name_(std::move(name)), pred_(std::move(pred)) {}

    bool contains(std::size_t k) const { return pred_(k); }
    const std::string& name() const { return name_; }

    static IndexSet all();
    static IndexSet none();
    static IndexSet evens();
    static IndexSet odds();
    static IndexSet squares();
    static IndexSet powers_of_two();
    /// Blocks [2^j, 2^j + j], j >= 0.
    static IndexSet sparse_blocks();
    /// {3 * 2^i : i >= 0}.
    static IndexSet geometric3();
    /// {k : k mod m in residues}.
    static IndexSet residues(std::size_t m, std::vector<std::size_t> residues);
    static IndexSet finite(std::vector<std::size_t> members);
    /// [a, b], inclusive.
    static IndexSet range(std::size_t a, std::size_t b);
    /// Materialized membership of 1..flags.size() (flags[k-1]); empty beyond.
    static IndexSet from_flags(std::string name, std::vector<char> flags);

    IndexSet complement() const;
    IndexSet united(const IndexSet& o) const;
    IndexSet intersected(const IndexSet& o) const;
    IndexSet minus(const IndexSet& o) const;

private:
    std::string name_;
    Pred pred_;
};

bool is_square(std::size_t k);

/// Prefix counts of an index set over 1..N.
class Indicator {
public:
    Indicator(const IndexSet& M, std::size_t N);
    explicit Indicator(std::span<const char> flags);  // flags[k-1] for k = 1..N

    std::size_t horizon() const { return prefix_.size() - 1; }
    bool contains(std::size_t k) const { return count(k, k) == 1; }
    /// |M cap [a, b]|, with b clamped to the horizon.
    std::size_t count(std::size_t a, std::size_t b) const;

private:
    std::vector<std::size_t> prefix_;
};

/// y_n = sum_{k in M} a_nk for n = 1..N (returned at index n - 1).
std::vector<double> a_density_partial(const SummMatrix& A, const Indicator& M);
std::vector<double> a_density_partial(const SummMatrix& A, const IndexSet& M, std::size_t N);

enum class Status { converged, inconclusive, diverged };
const char* to_string(Status s);

struct Verdict {
    double value = 0.0;      // limit or density estimate
    double residual = 0.0;   // worst residual supporting the status
    Status status = Status::inconclusive;
    double liminf = 0.0;     // tail range of the underlying sequence
    double limsup = 0.0;
    std::optional<std::size_t> point;    // limit point, for sequence detectors
    std::optional<std::size_t> witness;  // index witness (e.g. k_0)
    std::string note;

    bool converged() const { return status == Status::converged; }
};

class Ideal {
public:
    enum class Kind { fin, density_zero, predicate };
    using Member = std::function<bool(const IndexSet&, std::size_t N, double tol)>;

    /// Finite subsets of N.
    static Ideal fin();
    /// Sets of B-density zero.
    static Ideal density_zero(SummMatrix B);
    /// Membership by a caller-supplied decision procedure.
    static Ideal predicate(std::string name, Member member);

    Kind kind() const { return kind_; }
    std::string name() const;
    const SummMatrix& matrix() const;

    /// Leading fraction of the horizon ignored when collecting exceptional
    /// indices; 0 for fin, 1/4 for density ideals (finite prefixes are null
    /// in every admissible ideal).
    double burn_in() const { return kind_ == Kind::density_zero ? 0.25 : 0.0; }

    /// Finite-horizon membership: for fin, M misses the tail [N/2, N]; for
    /// density ideals, M has B-density zero within tol.
    bool contains(const IndexSet& M, std::size_t N, double tol) const;

private:
    Ideal(Kind k, std::string name) : kind_(k), name_(std::move(name)) {}

    Kind kind_;
    std::string name_;
    std::shared_ptr<const SummMatrix> matrix_;
    Member member_;
};

/// I-limit of y_1..y_N (y[n-1] = y_n). With candidates the best candidate is
/// reported; otherwise fin uses y_N and density ideals the tail median.
Verdict ideal_limit(std::span<const double> y, const Ideal& I, double tol, std::span<const double> candidates = {});

/// delta_{A^I}(M): ideal_limit over the A-density partial sums.
Verdict ai_density(const SummMatrix& A, const Ideal& I, const IndexSet& M, std::size_t N, double tol,
                   std::span<const double> candidates = {});
Verdict ai_density(const SummMatrix& A, const Ideal& I, const Indicator& M, double tol,
                   std::span<const double> candidates = {});

/// Density zero within tol (membership in J(A^I)).
bool is_null(const Verdict& v, double tol);
/// Does not have density zero: converged above tol, diverged, or
/// inconclusive with liminf above tol.
bool is_nonthin(const Verdict& v, double tol);

struct RegularityCondition {
    std::string name;
    bool passed = false;
    double residual = 0.0;
};

struct RegularityReport {
    std::vector<RegularityCondition> conditions;  // (i), (ii), (iii)
    double running_sup = 0.0;                     // sup_n sum_k |a_nk| up to N
    std::vector<std::size_t> sampled_columns;
    bool passed() const;
};

/// Silverman-Toeplitz conditions at horizon N (>= 10) on the tail [N/2, N].
RegularityReport check_regularity(const SummMatrix& A, std::size_t N, double tol);

struct APWitnessReport {
    bool passed = false;
    bool family_null = false;       // every A_j has density zero
    bool family_disjoint = false;   // pairwise disjoint on 1..N
    bool finite_differences = false;// A_j delta B_j misses the tail [N/2, N]
    bool union_null = false;        // union of B_j has density zero
    double union_density = 0.0;
};

/// Checks a given witness for the additive property: disjoint null sets A_j
/// and sets B_j differing finitely from them with a null union.
APWitnessReport check_ap_witness(const SummMatrix& A, const Ideal& I, std::span<const IndexSet> family,
                                 std::span<const IndexSet> witness, std::size_t N, double tol);

}  // namespace pmstat
