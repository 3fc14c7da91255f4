#include "hzreach/oracle.hpp"

#include "hzreach/lp.hpp"
#include "hzreach/matrix_utils.hpp"
#include "hzreach/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace hzreach::oracle
{
namespace
{

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// binaries this close to +-1 in a relaxation count as integral
constexpr double kIntegral = 1e-9;

void check_cap(const HybridZonotope& z, const Options& opt)
{
    if (z.num_binary() > opt.max_binaries)
        throw EnumerationCapError("oracle: " + std::to_string(z.num_binary()) +
                                  " binary factors exceed the enumeration cap of " +
                                  std::to_string(opt.max_binaries));
}

// LP over [xi_c; xi_b] with the set's constraints and, optionally, the membership rows
// Gc xi_c + Gb xi_b = x - c. Binary bounds are set per node.
class Relaxation
{
  public:
    Relaxation(const HybridZonotope& z, const Vector* point) : ng_(z.num_continuous()), nb_(z.num_binary())
    {
        const Index nc = z.num_constraints();
        const Index extra = point ? z.dim() : 0;
        problem_.A.resize(nc + extra, ng_ + nb_);
        problem_.b.resize(nc + extra);
        problem_.A.topLeftCorner(nc, ng_) = z.ac();
        problem_.A.topRightCorner(nc, nb_) = z.ab();
        problem_.b.head(nc) = z.b();
        if (point)
        {
            problem_.A.bottomLeftCorner(extra, ng_) = z.gc();
            problem_.A.bottomRightCorner(extra, nb_) = z.gb();
            problem_.b.tail(extra) = *point - z.center();
        }
        problem_.lower = Vector::Constant(ng_ + nb_, -1.0);
        problem_.upper = Vector::Constant(ng_ + nb_, 1.0);
    }

    void set_cost(const Vector& cost) { problem_.cost = cost; }

    lp::Result solve(const Vector& bin_lo, const Vector& bin_up, const lp::Options& lpo)
    {
        problem_.lower.tail(nb_) = bin_lo;
        problem_.upper.tail(nb_) = bin_up;
        lp::Result r = lp::solve(problem_, lpo);
        if (r.status == lp::Status::iteration_limit)
            throw std::runtime_error("oracle: LP iteration limit reached");
        return r;
    }

    Index ng() const { return ng_; }
    Index nb() const { return nb_; }

  private:
    Index ng_, nb_;
    lp::Problem problem_;
};

struct Node
{
    Vector lo;
    Vector up;
};

// Most fractional free binary of an LP point, or -1 if all free binaries are integral.
Index branching_index(const Vector& x, const Node& node, Index ng)
{
    Index best = -1;
    double worst = kIntegral;
    for (Index j = 0; j < node.lo.size(); ++j)
    {
        if (node.lo(j) == node.up(j))
            continue;
        const double v = x(ng + j);
        const double gap = std::min(std::abs(v - 1.0), std::abs(v + 1.0));
        if (gap > worst)
        {
            worst = gap;
            best = j;
        }
    }
    return best;
}

Index first_free(const Node& node)
{
    for (Index j = 0; j < node.lo.size(); ++j)
        if (node.lo(j) != node.up(j))
            return j;
    return -1;
}

// Push both children of node on binary j; the child matching `preferred` is explored first.
void branch(std::vector<Node>& stack, const Node& node, Index j, double preferred)
{
    Node first = node, second = node;
    const double a = preferred >= 0.0 ? 1.0 : -1.0;
    first.lo(j) = first.up(j) = a;
    second.lo(j) = second.up(j) = -a;
    stack.push_back(std::move(second));
    stack.push_back(std::move(first));
}

Node root(Index nb) { return Node{Vector::Constant(nb, -1.0), Vector::Constant(nb, 1.0)}; }

Node rounded(const Node& node, const Vector& x, Index ng)
{
    Node leaf = node;
    for (Index j = 0; j < node.lo.size(); ++j)
        if (node.lo(j) != node.up(j))
            leaf.lo(j) = leaf.up(j) = x(ng + j) >= 0.0 ? 1.0 : -1.0;
    return leaf;
}

// Depth-first search for any feasible leaf.
bool find_feasible(Relaxation& rel, const lp::Options& lpo, const Options& opt)
{
    std::vector<Node> stack{root(rel.nb())};
    long nodes = 0;
    while (!stack.empty())
    {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (++nodes > opt.max_nodes)
            throw EnumerationCapError("oracle: branch-and-bound node budget exhausted");
        const lp::Result r = rel.solve(node.lo, node.up, lpo);
        if (r.status != lp::Status::optimal)
            continue;
        const Index j = branching_index(r.x, node, rel.ng());
        if (j < 0)
        {
            if (first_free(node) < 0)
                return true;
            const Node leaf = rounded(node, r.x, rel.ng());
            if (rel.solve(leaf.lo, leaf.up, lpo).status == lp::Status::optimal)
                return true;
            const Index k = first_free(node);
            branch(stack, node, k, r.x(rel.ng() + k));
            continue;
        }
        branch(stack, node, j, r.x(rel.ng() + j));
    }
    return false;
}

double support_bb(const HybridZonotope& z, const Vector& d, const Options& opt)
{
    if (d.size() != z.dim())
        throw DimensionError("support: direction dimension mismatch");
    check_cap(z, opt);
    Relaxation rel(z, nullptr);
    Vector cost(rel.ng() + rel.nb());
    cost.head(rel.ng()) = -(z.gc().transpose() * d);
    cost.tail(rel.nb()) = -(z.gb().transpose() * d);
    rel.set_cost(cost);
    lp::Options lpo;
    lpo.feasibility_tol = opt.lp_tolerance;
    const double offset = d.dot(z.center());

    double best = kNegInf;
    std::vector<Node> stack{root(rel.nb())};
    long nodes = 0;
    while (!stack.empty())
    {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (++nodes > opt.max_nodes)
            throw EnumerationCapError("oracle: branch-and-bound node budget exhausted");
        const lp::Result r = rel.solve(node.lo, node.up, lpo);
        if (r.status != lp::Status::optimal)
            continue;
        const double bound = offset - r.objective;
        if (bound <= best)
            continue;
        const Index j = branching_index(r.x, node, rel.ng());
        if (j < 0)
        {
            if (first_free(node) < 0)
            {
                best = bound;
                continue;
            }
            const Node leaf = rounded(node, r.x, rel.ng());
            const lp::Result lr = rel.solve(leaf.lo, leaf.up, lpo);
            if (lr.status == lp::Status::optimal)
                best = std::max(best, offset - lr.objective);
            const Index k = first_free(node);
            if (lr.status != lp::Status::optimal || offset - lr.objective < bound - 1e-12)
                branch(stack, node, k, r.x(rel.ng() + k));
            continue;
        }
        branch(stack, node, j, r.x(rel.ng() + j));
    }
    return best;
}

// Minimal LP on one leaf's continuous factors.
lp::Result leaf_lp(const LeafProblem& leaf, const Vector& cost, const lp::Options& lpo)
{
    lp::Problem p;
    p.A = leaf.eq_a;
    p.b = leaf.eq_b;
    p.lower = Vector::Constant(leaf.generators.cols(), -1.0);
    p.upper = Vector::Constant(leaf.generators.cols(), 1.0);
    p.cost = cost;
    return lp::solve(p, lpo);
}

Vector binary_assignment(std::uint64_t bits, Index nb)
{
    Vector xb(nb);
    for (Index j = 0; j < nb; ++j)
        xb(j) = (bits >> j) & 1U ? 1.0 : -1.0;
    return xb;
}

// Leaf-wise sampler state: the least-norm projector and a pool of LP vertices.
struct LeafSampler
{
    LeafProblem leaf;
    Matrix projector; // pinv(eq_a)
    std::vector<Vector> vertices;
    Vector xb;
};

LeafSampler build_sampler(const HybridZonotope& z, const Vector& xb, std::uint64_t seed, const Options& opt)
{
    LeafSampler s;
    s.xb = xb;
    s.leaf = make_leaf(z, xb);
    const Index ng = s.leaf.generators.cols();
    if (ng == 0 || s.leaf.eq_a.rows() == 0)
        return s;
    s.projector = detail::pinv(s.leaf.eq_a);

    lp::Options lpo;
    lpo.feasibility_tol = opt.lp_tolerance;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const Index n = z.dim();
    std::vector<Vector> costs;
    for (Index k = 0; k < n; ++k)
    {
        costs.emplace_back(s.leaf.generators.row(k).transpose());
        costs.emplace_back(-s.leaf.generators.row(k).transpose());
    }
    const Index random_count = std::max<Index>(8, 2 * (n + 1));
    for (Index k = 0; k < random_count; ++k)
    {
        Vector c(ng);
        for (Index i = 0; i < ng; ++i)
            c(i) = normal(rng);
        costs.push_back(std::move(c));
    }
    costs.emplace_back(Vector::Zero(ng));
    for (const auto& c : costs)
    {
        const lp::Result r = leaf_lp(s.leaf, c, lpo);
        if (r.status == lp::Status::optimal)
            s.vertices.push_back(r.x);
    }
    if (s.vertices.empty())
        throw EmptySetError("sample: leaf reported feasible but no vertex was found");
    return s;
}

Vector draw_factors(const LeafSampler& s, std::mt19937_64& rng)
{
    const Index ng = s.leaf.generators.cols();
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vector xi(ng);
    if (s.leaf.eq_a.rows() == 0)
    {
        for (Index i = 0; i < ng; ++i)
            xi(i) = unit(rng);
        return xi;
    }
    for (int attempt = 0; attempt < 30; ++attempt)
    {
        for (Index i = 0; i < ng; ++i)
            xi(i) = unit(rng);
        xi -= s.projector * (s.leaf.eq_a * xi - s.leaf.eq_b);
        if (xi.cwiseAbs().maxCoeff() <= 1.0 && (s.leaf.eq_a * xi - s.leaf.eq_b).cwiseAbs().maxCoeff() <= 1e-10)
            return xi;
    }
    // random convex combination of pool vertices; occasionally a pure vertex
    const std::size_t count = s.vertices.size();
    std::uniform_int_distribution<std::size_t> pick(0, count - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < 0.1)
        return s.vertices[pick(rng)];
    std::exponential_distribution<double> expo(1.0);
    xi.setZero();
    double total = 0.0;
    for (const auto& v : s.vertices)
    {
        const double w = expo(rng);
        xi += w * v;
        total += w;
    }
    return xi / total;
}

} // namespace

LeafProblem make_leaf(const HybridZonotope& z, const Vector& xb)
{
    if (xb.size() != z.num_binary())
        throw DimensionError("make_leaf: binary assignment has the wrong length");
    return LeafProblem{z.gc(), z.center() + z.gb() * xb, z.ac(), z.b() - z.ab() * xb};
}

bool membership(const HybridZonotope& z, const Vector& x, double tol, const Options& opt)
{
    if (x.size() != z.dim())
        throw DimensionError("membership: point dimension mismatch");
    check_cap(z, opt);
    Relaxation rel(z, &x);
    lp::Options lpo;
    lpo.feasibility_tol = tol;
    return find_feasible(rel, lpo, opt);
}

double support(const HybridZonotope& z, const Vector& d, const Options& opt) { return support_bb(z, d, opt); }

bool is_empty(const HybridZonotope& z, const Options& opt)
{
    check_cap(z, opt);
    Relaxation rel(z, nullptr);
    lp::Options lpo;
    lpo.feasibility_tol = opt.lp_tolerance;
    return !find_feasible(rel, lpo, opt);
}

std::optional<Box> interval_hull(const HybridZonotope& z, const Options& opt)
{
    const Index n = z.dim();
    Matrix dirs(n, 2 * n);
    dirs.leftCols(n) = Matrix::Identity(n, n);
    dirs.rightCols(n) = -Matrix::Identity(n, n);
    const std::vector<double> h = support_batch(z, dirs, opt);
    Box box{Vector(n), Vector(n)};
    for (Index k = 0; k < n; ++k)
    {
        const double up = h[static_cast<std::size_t>(k)];
        const double down = h[static_cast<std::size_t>(n + k)];
        if (up == kNegInf || down == kNegInf)
            return std::nullopt;
        box.upper(k) = up;
        box.lower(k) = -down;
    }
    if (n == 0 && is_empty(z, opt))
        return std::nullopt;
    return box;
}

std::vector<Vector> feasible_leaves(const HybridZonotope& z, const Options& opt)
{
    check_cap(z, opt);
    Relaxation rel(z, nullptr);
    lp::Options lpo;
    lpo.feasibility_tol = opt.lp_tolerance;
    std::vector<Vector> leaves;
    // depth-first in binary index order, -1 branch first
    struct Frame
    {
        Node node;
        Index depth;
    };
    std::vector<Frame> stack{{root(rel.nb()), 0}};
    long nodes = 0;
    while (!stack.empty())
    {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (++nodes > opt.max_nodes)
            throw EnumerationCapError("oracle: branch-and-bound node budget exhausted");
        if (rel.solve(f.node.lo, f.node.up, lpo).status != lp::Status::optimal)
            continue;
        if (f.depth == rel.nb())
        {
            leaves.push_back(f.node.lo);
            continue;
        }
        Frame plus = f, minus = f;
        plus.node.lo(f.depth) = plus.node.up(f.depth) = 1.0;
        minus.node.lo(f.depth) = minus.node.up(f.depth) = -1.0;
        ++plus.depth;
        ++minus.depth;
        stack.push_back(std::move(plus));
        stack.push_back(std::move(minus));
    }
    return leaves;
}

std::vector<Vector> sample(const HybridZonotope& z, int count, std::uint64_t seed, const Options& opt)
{
    const std::vector<Vector> leaves = feasible_leaves(z, opt);
    if (leaves.empty())
        throw EmptySetError("sample: the set is empty");
    std::vector<LeafSampler> samplers(leaves.size());
    detail::parallel_for(static_cast<long>(leaves.size()), [&](long i) {
        samplers[static_cast<std::size_t>(i)] =
            build_sampler(z, leaves[static_cast<std::size_t>(i)], detail::mix_seed(seed ^ 0x5bd1e995ULL, i), opt);
    });

    std::vector<Vector> points(static_cast<std::size_t>(std::max(count, 0)));
    detail::parallel_for(count, [&](long i) {
        std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<std::size_t> pick(0, samplers.size() - 1);
        const LeafSampler& s = samplers[pick(rng)];
        const Vector xi = s.leaf.generators.cols() > 0 ? draw_factors(s, rng) : Vector(0);
        points[static_cast<std::size_t>(i)] = s.leaf.center + s.leaf.generators * xi;
    });
    return points;
}

std::vector<double> support_batch(const HybridZonotope& z, const Matrix& directions, const Options& opt)
{
    std::vector<double> out(static_cast<std::size_t>(directions.cols()));
    detail::parallel_for(directions.cols(), [&](long i) {
        out[static_cast<std::size_t>(i)] = support(z, directions.col(i), opt);
    });
    return out;
}

std::vector<char> membership_batch(const HybridZonotope& z, const Matrix& points, double tol, const Options& opt)
{
    std::vector<char> out(static_cast<std::size_t>(points.cols()));
    detail::parallel_for(points.cols(), [&](long i) {
        out[static_cast<std::size_t>(i)] = membership(z, points.col(i), tol, opt) ? 1 : 0;
    });
    return out;
}

Matrix spread_directions(Index n, int count)
{
    Matrix dirs(n, count);
    if (n == 2)
    {
        for (int k = 0; k < count; ++k)
        {
            const double a = 2.0 * std::numbers::pi * k / count;
            dirs(0, k) = std::cos(a);
            dirs(1, k) = std::sin(a);
        }
        return dirs;
    }
    std::mt19937_64 rng(0x2545f4914f6cdd1dULL);
    std::normal_distribution<double> normal;
    for (int k = 0; k < count; ++k)
    {
        if (k < 2 * n)
        {
            dirs.col(k).setZero();
            dirs(k / 2, k) = k % 2 == 0 ? 1.0 : -1.0;
            continue;
        }
        Vector v(n);
        for (Index i = 0; i < n; ++i)
            v(i) = normal(rng);
        dirs.col(k) = v.normalized();
    }
    return dirs;
}

namespace reference
{

bool membership(const HybridZonotope& z, const Vector& x, double tol, const Options& opt)
{
    if (x.size() != z.dim())
        throw DimensionError("membership: point dimension mismatch");
    check_cap(z, opt);
    lp::Options lpo;
    lpo.feasibility_tol = tol;
    const Index nb = z.num_binary();
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nb); ++bits)
    {
        const LeafProblem leaf = make_leaf(z, binary_assignment(bits, nb));
        lp::Problem p;
        p.A = detail::vstack(leaf.generators.cols(), {&leaf.eq_a, &leaf.generators});
        const Vector shifted = x - leaf.center;
        p.b = detail::vcat({&leaf.eq_b, &shifted});
        p.lower = Vector::Constant(leaf.generators.cols(), -1.0);
        p.upper = Vector::Constant(leaf.generators.cols(), 1.0);
        if (lp::solve(p, lpo).status == lp::Status::optimal)
            return true;
    }
    return false;
}

double support(const HybridZonotope& z, const Vector& d, const Options& opt)
{
    if (d.size() != z.dim())
        throw DimensionError("support: direction dimension mismatch");
    check_cap(z, opt);
    lp::Options lpo;
    lpo.feasibility_tol = opt.lp_tolerance;
    const Index nb = z.num_binary();
    double best = kNegInf;
    const Vector cost = -(z.gc().transpose() * d);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nb); ++bits)
    {
        const LeafProblem leaf = make_leaf(z, binary_assignment(bits, nb));
        const lp::Result r = leaf_lp(leaf, cost, lpo);
        if (r.status == lp::Status::optimal)
            best = std::max(best, d.dot(leaf.center) - r.objective);
    }
    return best;
}

bool is_empty(const HybridZonotope& z, const Options& opt)
{
    check_cap(z, opt);
    lp::Options lpo;
    lpo.feasibility_tol = opt.lp_tolerance;
    const Index nb = z.num_binary();
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nb); ++bits)
    {
        const LeafProblem leaf = make_leaf(z, binary_assignment(bits, nb));
        if (leaf_lp(leaf, Vector(), lpo).status == lp::Status::optimal)
            return false;
    }
    return true;
}

std::vector<double> support_batch(const HybridZonotope& z, const Matrix& directions, const Options& opt)
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(directions.cols()));
    for (Index i = 0; i < directions.cols(); ++i)
        out.push_back(reference::support(z, directions.col(i), opt));
    return out;
}

std::vector<char> membership_batch(const HybridZonotope& z, const Matrix& points, double tol, const Options& opt)
{
    std::vector<char> out;
    out.reserve(static_cast<std::size_t>(points.cols()));
    for (Index i = 0; i < points.cols(); ++i)
        out.push_back(reference::membership(z, points.col(i), tol, opt) ? 1 : 0);
    return out;
}

} // namespace reference

} // namespace hzreach::oracle
