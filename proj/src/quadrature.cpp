#include "ustokes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

namespace ustokes {

namespace {

/* Gauss 7 / Kronrod 15 pair (positive halves, center last) */
constexpr double kXgk15[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                              0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
                              0.2077849550078985, 0.0};
constexpr double kWgk15[8] = {0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
                              0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
                              0.2044329400752989, 0.2094821410847278};
constexpr double kWg7[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                            0.4179591836734694};

/* Gauss 3 / Kronrod 7 pair, full node lists in ascending order */
constexpr double kXk7[7] = {-0.9604912687080203, -0.7745966692414834, -0.4342437493468026,
                            0.0,                 0.4342437493468026,  0.7745966692414834,
                            0.9604912687080203};
constexpr double kWk7[7] = {0.1046562260264673, 0.2684880898683334, 0.4013974147759622,
                            0.4509165386584741, 0.4013974147759622, 0.2684880898683334,
                            0.1046562260264673};
constexpr double kWg3[7] = {0.0, 5.0 / 9.0, 0.0, 8.0 / 9.0, 0.0, 5.0 / 9.0, 0.0};

double floor_for(const QuadOptions& opt, int c) {
  if (opt.abs_floor.empty()) return 0.0;
  if (opt.abs_floor.size() == 1) return opt.abs_floor[0];
  return opt.abs_floor[c];
}

double noise_for(const QuadOptions& opt, int c) {
  if (opt.abs_noise.empty()) return 0.0;
  if (opt.abs_noise.size() == 1) return opt.abs_noise[0];
  return opt.abs_noise[c];
}

struct Cell {
  double a0, b0, a1, b1; /* 1-D uses (a0,b0) only */
  int depth;
  long id;
  double priority;
  std::vector<double> val, err, l1;
};

struct CellCmp {
  bool operator()(const Cell* x, const Cell* y) const {
    if (x->priority != y->priority) return x->priority < y->priority;
    return x->id > y->id;
  }
};

class Accumulator {
 public:
  Accumulator(int m, const QuadOptions& opt)
      : m_(m), opt_(opt), tot_(m, 0.0), errtot_(m, 0.0), l1tot_(m, 0.0) {}

  void add(const Cell& cell, double sgn) {
    for (int c = 0; c < m_; ++c) {
      tot_[c] += sgn * cell.val[c];
      errtot_[c] += sgn * cell.err[c];
      l1tot_[c] += sgn * cell.l1[c];
    }
  }
  /* reference scale: the integral itself, the caller's floor, or the round-off
     floor -- the larger of the node-mass noise and any noise the integrand
     reports about its own internal cancellation */
  double ref(int c) const {
    double noise = opt_.noise_rel * l1tot_[c] + noise_for(opt_, c);
    return std::max({std::abs(tot_[c]), floor_for(opt_, c),
                     noise / opt_.rel_tol, 1e-300});
  }
  bool converged() const {
    for (int c = 0; c < m_; ++c)
      if (errtot_[c] > opt_.rel_tol * ref(c)) return false;
    return true;
  }
  double priority(const std::vector<double>& e) const {
    double p = 0.0;
    for (int c = 0; c < m_; ++c) p = std::max(p, e[c] / ref(c));
    return p;
  }
  double achieved() const {
    double w = 0.0;
    for (int c = 0; c < m_; ++c) w = std::max(w, errtot_[c] / ref(c));
    return w;
  }
  const std::vector<double>& total() const { return tot_; }

 private:
  int m_;
  const QuadOptions& opt_;
  std::vector<double> tot_, errtot_, l1tot_;
};

std::vector<double> cell_edges(double a, double b, const std::vector<double>& interior) {
  std::vector<double> e{a};
  for (double x : interior)
    if (x > a && x < b) e.push_back(x);
  e.push_back(b);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

}  // namespace

QuadResult integrate_1d(const Integrand1D& f, int m, double a, double b,
                        const std::vector<double>& interior_breaks, const QuadOptions& opt) {
  QuadResult res;
  res.value.assign(m, 0.0);
  if (!(b > a)) return res;
  Accumulator acc(m, opt);
  std::deque<Cell> store; /* stable addresses for heap pointers */
  std::priority_queue<Cell*, std::vector<Cell*>, CellCmp> heap;
  long next_id = 0;
  long evals = 0;
  std::vector<double> buf(m);

  auto eval_cell = [&](double ca, double cb, int depth) {
    Cell cell;
    cell.a0 = ca;
    cell.b0 = cb;
    cell.a1 = cell.b1 = 0.0;
    cell.depth = depth;
    cell.id = next_id++;
    cell.val.assign(m, 0.0);
    cell.err.assign(m, 0.0);
    cell.l1.assign(m, 0.0);
    double h = 0.5 * (cb - ca), mid = 0.5 * (ca + cb);
    std::vector<double> g(m, 0.0);
    for (int i = 0; i < 8; ++i) {
      for (int sgn = (i == 7 ? 1 : 0); sgn < 2; ++sgn) {
        double x = mid + (sgn ? 1.0 : -1.0) * h * kXgk15[i];
        f(x, buf.data());
        ++evals;
        for (int c = 0; c < m; ++c) {
          cell.val[c] += kWgk15[i] * buf[c];
          cell.l1[c] += kWgk15[i] * std::abs(buf[c]);
          if (i % 2 == 1) g[c] += kWg7[i / 2] * buf[c]; /* odd slots are Gauss-7 nodes */
        }
      }
    }
    for (int c = 0; c < m; ++c) {
      cell.val[c] *= h;
      cell.l1[c] *= h;
      g[c] *= h;
      cell.err[c] = std::abs(cell.val[c] - g[c]);
    }
    return cell;
  };

  auto edges = cell_edges(a, b, interior_breaks);
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    store.push_back(eval_cell(edges[i], edges[i + 1], 0));
    acc.add(store.back(), 1.0);
  }
  for (auto& c : store) {
    c.priority = acc.priority(c.err);
    heap.push(&c);
  }

  while (!acc.converged()) {
    if (heap.empty() || static_cast<long>(store.size()) > opt.max_intervals)
      throw AccuracyError("1-D quadrature did not converge", acc.achieved());
    Cell* top = heap.top();
    heap.pop();
    if (top->depth >= opt.max_depth) continue; /* frozen; error stays accounted */
    double mid = 0.5 * (top->a0 + top->b0);
    Cell left = eval_cell(top->a0, mid, top->depth + 1);
    Cell right = eval_cell(mid, top->b0, top->depth + 1);
    acc.add(*top, -1.0);
    acc.add(left, 1.0);
    acc.add(right, 1.0);
    top->val.assign(m, 0.0); /* parent replaced by children */
    top->err.assign(m, 0.0);
    top->l1.assign(m, 0.0);
    left.priority = acc.priority(left.err);
    right.priority = acc.priority(right.err);
    store.push_back(std::move(left));
    heap.push(&store.back());
    store.push_back(std::move(right));
    heap.push(&store.back());
  }
  res.value = acc.total();
  res.achieved = acc.achieved();
  res.evals = evals;
  return res;
}

QuadResult integrate_2d(const Integrand2D& f, int m, double ax, double bx, double ay,
                        double by, const std::vector<double>& xbreaks,
                        const std::vector<double>& ybreaks, const QuadOptions& opt,
                        double scale_x, double scale_y) {
  QuadResult res;
  res.value.assign(m, 0.0);
  if (!(bx > ax) || !(by > ay)) return res;
  if (scale_x <= 0.0) scale_x = bx - ax;
  if (scale_y <= 0.0) scale_y = by - ay;
  Accumulator acc(m, opt);
  long next_id = 0;
  long evals = 0;
  std::vector<double> buf(m);

  auto eval_cell = [&](double a0, double b0, double a1, double b1, int depth) {
    Cell cell;
    cell.a0 = a0;
    cell.b0 = b0;
    cell.a1 = a1;
    cell.b1 = b1;
    cell.depth = depth;
    cell.id = next_id++;
    cell.val.assign(m, 0.0);
    cell.err.assign(m, 0.0);
    cell.l1.assign(m, 0.0);
    std::vector<double> g(m, 0.0);
    double hx = 0.5 * (b0 - a0), cx = 0.5 * (a0 + b0);
    double hy = 0.5 * (b1 - a1), cy = 0.5 * (a1 + b1);
    for (int i = 0; i < 7; ++i) {
      double x = cx + hx * kXk7[i];
      for (int j = 0; j < 7; ++j) {
        double y = cy + hy * kXk7[j];
        f(x, y, buf.data());
        ++evals;
        double wk = kWk7[i] * kWk7[j];
        double wg = kWg3[i] * kWg3[j];
        for (int c = 0; c < m; ++c) {
          cell.val[c] += wk * buf[c];
          cell.l1[c] += wk * std::abs(buf[c]);
          if (wg != 0.0) g[c] += wg * buf[c];
        }
      }
    }
    for (int c = 0; c < m; ++c) {
      cell.val[c] *= hx * hy;
      cell.l1[c] *= hx * hy;
      g[c] *= hx * hy;
      cell.err[c] = std::abs(cell.val[c] - g[c]);
    }
    return cell;
  };

  std::deque<Cell> store;
  std::priority_queue<Cell*, std::vector<Cell*>, CellCmp> heap;
  auto ex = cell_edges(ax, bx, xbreaks);
  auto ey = cell_edges(ay, by, ybreaks);
  for (size_t i = 0; i + 1 < ex.size(); ++i)
    for (size_t j = 0; j + 1 < ey.size(); ++j) {
      store.push_back(eval_cell(ex[i], ex[i + 1], ey[j], ey[j + 1], 0));
      acc.add(store.back(), 1.0);
    }
  for (auto& c : store) {
    c.priority = acc.priority(c.err);
    heap.push(&c);
  }

  while (!acc.converged()) {
    if (heap.empty() || static_cast<long>(store.size()) > opt.max_intervals)
      throw AccuracyError("2-D quadrature did not converge", acc.achieved());
    Cell* top = heap.top();
    heap.pop();
    if (top->depth >= opt.max_depth) continue;
    bool split_x = (top->b0 - top->a0) / scale_x >= (top->b1 - top->a1) / scale_y;
    Cell c1, c2;
    if (split_x) {
      double mid = 0.5 * (top->a0 + top->b0);
      c1 = eval_cell(top->a0, mid, top->a1, top->b1, top->depth + 1);
      c2 = eval_cell(mid, top->b0, top->a1, top->b1, top->depth + 1);
    } else {
      double mid = 0.5 * (top->a1 + top->b1);
      c1 = eval_cell(top->a0, top->b0, top->a1, mid, top->depth + 1);
      c2 = eval_cell(top->a0, top->b0, mid, top->b1, top->depth + 1);
    }
    acc.add(*top, -1.0);
    acc.add(c1, 1.0);
    acc.add(c2, 1.0);
    top->val.assign(m, 0.0);
    top->err.assign(m, 0.0);
    top->l1.assign(m, 0.0);
    c1.priority = acc.priority(c1.err);
    c2.priority = acc.priority(c2.err);
    store.push_back(std::move(c1));
    heap.push(&store.back());
    store.push_back(std::move(c2));
    heap.push(&store.back());
  }
  res.value = acc.total();
  res.achieved = acc.achieved();
  res.evals = evals;
  return res;
}

}  // namespace ustokes
