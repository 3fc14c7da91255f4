#include "hzreach/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hzreach::lp
{
namespace
{

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Tableau over [A | S] where S = diag(sign) holds one artificial per row.
class Simplex
{
  public:
    Simplex(const Problem& p, const Options& opt) : p_(p), opt_(opt)
    {
        m_ = p.A.rows();
        n_ = p.A.cols();
        total_ = n_ + m_;

        lo_.resize(total_);
        up_.resize(total_);
        lo_.head(n_) = p.lower;
        up_.head(n_) = p.upper;
        lo_.tail(m_).setZero();
        up_.tail(m_).setConstant(kInf);

        sign_.resize(m_);
        const Vector r = p.b - p.A * p.lower;
        for (Index i = 0; i < m_; ++i)
            sign_(i) = r(i) >= 0.0 ? 1.0 : -1.0;

        T_.resize(m_, total_);
        T_.leftCols(n_) = sign_.asDiagonal() * p.A;
        T_.rightCols(m_).setIdentity();

        xb_ = r.cwiseAbs();
        basis_.resize(m_);
        where_.assign(total_, -1);
        at_upper_.assign(total_, 0);
        for (Index i = 0; i < m_; ++i)
        {
            basis_[i] = n_ + i;
            where_[n_ + i] = static_cast<int>(i);
        }
    }

    Result run()
    {
        Result res;

        // phase one: drive artificials to zero
        Vector cost1 = Vector::Zero(total_);
        cost1.tail(m_).setOnes();
        Status st = iterate(cost1, res.iterations);
        if (st == Status::iteration_limit)
        {
            res.status = st;
            return res;
        }
        refresh();
        res.infeasibility = 0.0;
        for (Index i = 0; i < m_; ++i)
            if (basis_[i] >= n_)
                res.infeasibility += std::max(0.0, xb_(i));
        if (res.infeasibility > opt_.feasibility_tol)
        {
            res.status = Status::infeasible;
            res.x = structural();
            return res;
        }

        // retire artificials: fix them at zero and pivot out where possible
        for (Index j = n_; j < total_; ++j)
            up_(j) = 0.0;
        for (Index i = 0; i < m_; ++i)
        {
            if (basis_[i] < n_)
                continue;
            Index best = -1;
            double best_abs = 1e-9;
            for (Index j = 0; j < n_; ++j)
            {
                if (where_[j] >= 0)
                    continue;
                const double a = std::abs(T_(i, j));
                if (a > best_abs)
                {
                    best_abs = a;
                    best = j;
                }
            }
            if (best >= 0)
            {
                const double v = nonbasic_value(best);
                const Index leaving = basis_[i];
                pivot(i, best);
                where_[leaving] = -1;
                at_upper_[leaving] = 0;
                basis_[i] = best;
                where_[best] = static_cast<int>(i);
                xb_(i) = v;
            }
        }
        refresh();

        if (p_.cost.size() == n_ && n_ > 0)
        {
            Vector cost2 = Vector::Zero(total_);
            cost2.head(n_) = p_.cost;
            st = iterate(cost2, res.iterations);
            if (st == Status::iteration_limit)
            {
                res.status = st;
                return res;
            }
            refresh();
        }

        res.status = Status::optimal;
        res.x = structural();
        res.objective = p_.cost.size() == n_ ? p_.cost.dot(res.x) : 0.0;
        return res;
    }

  private:
    double nonbasic_value(Index j) const { return at_upper_[j] ? up_(j) : lo_(j); }

    Vector structural() const
    {
        Vector x(n_);
        for (Index j = 0; j < n_; ++j)
            x(j) = where_[j] >= 0 ? xb_(where_[j]) : nonbasic_value(j);
        // clamp roundoff onto the box
        for (Index j = 0; j < n_; ++j)
            x(j) = std::min(std::max(x(j), lo_(j)), up_(j));
        return x;
    }

    // Recompute basic values from B^{-1} = T[:, n:] * S.
    void refresh()
    {
        if (m_ == 0)
            return;
        Vector rhs = p_.b;
        for (Index j = 0; j < n_; ++j)
            if (where_[j] < 0)
            {
                const double v = nonbasic_value(j);
                if (v != 0.0)
                    rhs -= p_.A.col(j) * v;
            }
        const Matrix binv = T_.rightCols(m_) * sign_.asDiagonal();
        xb_ = binv * rhs;
    }

    void pivot(Index r, Index q)
    {
        const double piv = T_(r, q);
        Eigen::RowVectorXd row = T_.row(r) / piv;
        Vector col = T_.col(q);
        col(r) = 0.0;
        T_.noalias() -= col * row;
        T_.row(r) = row;
    }

    Status iterate(const Vector& cost, int& iterations)
    {
        int degenerate = 0;
        int since_refresh = 0;
        Vector cb(m_);
        while (true)
        {
            if (iterations >= opt_.max_iterations)
                return Status::iteration_limit;
            const bool bland = degenerate > opt_.degenerate_switch;

            for (Index i = 0; i < m_; ++i)
                cb(i) = cost(basis_[i]);
            const Eigen::RowVectorXd y = cb.transpose() * T_;

            Index q = -1;
            double dir = 0.0;
            double best = 0.0;
            for (Index j = 0; j < total_; ++j)
            {
                if (where_[j] >= 0 || up_(j) - lo_(j) <= 0.0)
                    continue;
                const double d = cost(j) - (m_ > 0 ? y(j) : 0.0);
                double score = 0.0;
                double jdir = 0.0;
                if (!at_upper_[j] && d < -opt_.optimality_tol)
                {
                    score = -d;
                    jdir = 1.0;
                }
                else if (at_upper_[j] && d > opt_.optimality_tol)
                {
                    score = d;
                    jdir = -1.0;
                }
                else
                    continue;
                if (bland)
                {
                    q = j;
                    dir = jdir;
                    break;
                }
                if (score > best)
                {
                    best = score;
                    q = j;
                    dir = jdir;
                }
            }
            if (q < 0)
                return Status::optimal;

            // ratio test
            double theta = up_(q) - lo_(q);
            Index r = -1;
            double r_abs = 0.0;
            bool r_to_upper = false;
            for (Index i = 0; i < m_; ++i)
            {
                const double a = dir * T_(i, q);
                double lim;
                bool to_upper;
                const Index bi = basis_[i];
                if (a > opt_.pivot_tol)
                {
                    lim = (xb_(i) - lo_(bi)) / a;
                    to_upper = false;
                }
                else if (a < -opt_.pivot_tol && std::isfinite(up_(bi)))
                {
                    lim = (up_(bi) - xb_(i)) / (-a);
                    to_upper = true;
                }
                else
                    continue;
                lim = std::max(lim, 0.0);
                const double aa = std::abs(a);
                bool take = false;
                if (lim < theta - 1e-12)
                    take = true;
                else if (lim <= theta + 1e-12 && r >= 0)
                {
                    if (bland)
                        take = basis_[i] < basis_[r];
                    else
                        take = aa > r_abs;
                }
                if (take)
                {
                    theta = lim;
                    r = i;
                    r_abs = aa;
                    r_to_upper = to_upper;
                }
            }
            if (!std::isfinite(theta))
                return Status::optimal; // unbounded cannot occur with finite structural bounds

            ++iterations;
            if (m_ > 0 && theta != 0.0)
                xb_.noalias() -= (theta * dir) * T_.col(q);
            degenerate = theta < 1e-12 ? degenerate + 1 : 0;

            if (r < 0)
            {
                at_upper_[q] = !at_upper_[q];
            }
            else
            {
                const double entering_value = nonbasic_value(q) + dir * theta;
                const Index leaving = basis_[r];
                pivot(r, q);
                where_[leaving] = -1;
                at_upper_[leaving] = r_to_upper ? 1 : 0;
                basis_[r] = q;
                where_[q] = static_cast<int>(r);
                at_upper_[q] = 0;
                xb_(r) = entering_value;
                if (++since_refresh >= 64)
                {
                    refresh();
                    since_refresh = 0;
                }
            }
        }
    }

    const Problem& p_;
    const Options& opt_;
    Index m_ = 0, n_ = 0, total_ = 0;
    RowMatrix T_;
    Vector lo_, up_, sign_, xb_;
    std::vector<Index> basis_;
    std::vector<int> where_;
    std::vector<char> at_upper_;
};

} // namespace

Result solve(const Problem& problem, const Options& options)
{
    const Index n = problem.A.cols();
    if (problem.b.size() != problem.A.rows() || problem.lower.size() != n || problem.upper.size() != n ||
        (problem.cost.size() != 0 && problem.cost.size() != n))
        throw DimensionError("lp::solve: inconsistent problem dimensions");
    for (Index j = 0; j < n; ++j)
    {
        if (!std::isfinite(problem.lower(j)) || !std::isfinite(problem.upper(j)))
            throw std::invalid_argument("lp::solve: bounds must be finite");
        if (problem.lower(j) > problem.upper(j))
        {
            Result r;
            r.status = Status::infeasible;
            r.infeasibility = problem.lower(j) - problem.upper(j);
            return r;
        }
    }
    Simplex s(problem, options);
    return s.run();
}

} // namespace hzreach::lp
