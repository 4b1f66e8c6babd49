#include "crossner/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crossner/error.h"
#include "crossner/rng.h"

namespace crossner::ops {
namespace {

template <typename T>
void require_same_graph(Var<T> a, Var<T> b, const char* op) {
  if (a.graph != b.graph || a.graph == nullptr) {
    throw ContractError(std::string(op) + ": operands belong to different graphs");
  }
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

// c += a * b
template <typename T>
void gemm_nn(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    T* crow = &c(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a(i, p);
      if (av == T(0)) continue;
      const T* brow = &b(p, 0);
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

// c += a * b^T
template <typename T>
void gemm_nt(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const T* arow = &a(i, 0);
    for (std::size_t j = 0; j < m; ++j) {
      const T* brow = &b(j, 0);
      T acc = T(0);
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c(i, j) += acc;
    }
  }
}

// c += a^T * b
template <typename T>
void gemm_tn(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t r = 0; r < n; ++r) {
    const T* brow = &b(r, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a(r, p);
      if (av == T(0)) continue;
      T* crow = &c(p, 0);
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void add_into(Tensor<T>& dst, const Tensor<T>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

template <typename T>
T log_sum_exp(std::span<const T> xs) {
  T hi = -std::numeric_limits<T>::infinity();
  for (T x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  T acc = T(0);
  for (T x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  require_same_graph(a, b, "matmul");
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: inner dimensions disagree " + av.shape_string() + " x " +
                         bv.shape_string());
  }
  Tensor<T> out(av.rows(), bv.cols());
  gemm_nn(av, bv, out);
  return a.graph->record(std::move(out), {a.id, b.id}, [ai = a.id, bi = b.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& dc = g.grad(self);
    if (g.needs_grad(ai)) gemm_nt(dc, g.value(bi), g.grad(ai));
    if (g.needs_grad(bi)) gemm_tn(g.value(ai), dc, g.grad(bi));
  });
}

template <typename T>
Var<T> transpose(Var<T> a) {
  const Tensor<T>& av = a.value();
  Tensor<T> out(av.cols(), av.rows());
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < av.cols(); ++j) out(j, i) = av(i, j);
  return a.graph->record(std::move(out), {a.id}, [ai = a.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    Tensor<T>& da = g.grad(ai);
    for (std::size_t i = 0; i < da.rows(); ++i)
      for (std::size_t j = 0; j < da.cols(); ++j) da(i, j) += d(j, i);
  });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  require_same_graph(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  Tensor<T> out = a.value();
  add_into(out, b.value());
  return a.graph->record(std::move(out), {a.id, b.id}, [ai = a.id, bi = b.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    if (g.needs_grad(ai)) add_into(g.grad(ai), d);
    if (g.needs_grad(bi)) add_into(g.grad(bi), d);
  });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  require_same_graph(a, b, "sub");
  require_same_shape(a.value(), b.value(), "sub");
  Tensor<T> out = a.value();
  const Tensor<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return a.graph->record(std::move(out), {a.id, b.id}, [ai = a.id, bi = b.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    if (g.needs_grad(ai)) add_into(g.grad(ai), d);
    if (g.needs_grad(bi)) {
      Tensor<T>& db = g.grad(bi);
      for (std::size_t i = 0; i < db.size(); ++i) db[i] -= d[i];
    }
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  require_same_graph(a, b, "mul");
  require_same_shape(a.value(), b.value(), "mul");
  Tensor<T> out = a.value();
  const Tensor<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return a.graph->record(std::move(out), {a.id, b.id}, [ai = a.id, bi = b.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    if (g.needs_grad(ai)) {
      Tensor<T>& da = g.grad(ai);
      const Tensor<T>& bv = g.value(bi);
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += d[i] * bv[i];
    }
    if (g.needs_grad(bi)) {
      Tensor<T>& db = g.grad(bi);
      const Tensor<T>& av = g.value(ai);
      for (std::size_t i = 0; i < db.size(); ++i) db[i] += d[i] * av[i];
    }
  });
}

template <typename T>
Var<T> add_row(Var<T> a, Var<T> row) {
  require_same_graph(a, row, "add_row");
  const Tensor<T>& av = a.value();
  const Tensor<T>& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw DimensionError("add_row: cannot broadcast " + rv.shape_string() + " over " +
                         av.shape_string());
  }
  Tensor<T> out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += rv[j];
  return a.graph->record(std::move(out), {a.id, row.id}, [ai = a.id, ri = row.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    if (g.needs_grad(ai)) add_into(g.grad(ai), d);
    if (g.needs_grad(ri)) {
      Tensor<T>& dr = g.grad(ri);
      for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) dr[j] += d(i, j);
    }
  });
}

template <typename T>
Var<T> mul_row(Var<T> a, Var<T> row) {
  require_same_graph(a, row, "mul_row");
  const Tensor<T>& av = a.value();
  const Tensor<T>& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw DimensionError("mul_row: cannot broadcast " + rv.shape_string() + " over " +
                         av.shape_string());
  }
  Tensor<T> out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= rv[j];
  return a.graph->record(std::move(out), {a.id, row.id}, [ai = a.id, ri = row.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    const Tensor<T>& av = g.value(ai);
    const Tensor<T>& rv = g.value(ri);
    if (g.needs_grad(ai)) {
      Tensor<T>& da = g.grad(ai);
      for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) da(i, j) += d(i, j) * rv[j];
    }
    if (g.needs_grad(ri)) {
      Tensor<T>& dr = g.grad(ri);
      for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) dr[j] += d(i, j) * av(i, j);
    }
  });
}

template <typename T>
Var<T> scale(Var<T> a, T factor) {
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  return a.graph->record(std::move(out), {a.id}, [ai = a.id, factor](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    Tensor<T>& da = g.grad(ai);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += d[i] * factor;
  });
}

template <typename T>
Var<T> sigmoid(Var<T> a) {
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T x = out[i];
    out[i] = x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
  }
  return a.graph->record(std::move(out), {a.id}, [ai = a.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    const Tensor<T>& y = g.value(self);
    Tensor<T>& da = g.grad(ai);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += d[i] * y[i] * (T(1) - y[i]);
  });
}

template <typename T>
Var<T> tanh(Var<T> a) {
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return a.graph->record(std::move(out), {a.id}, [ai = a.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    const Tensor<T>& y = g.value(self);
    Tensor<T>& da = g.grad(ai);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += d[i] * (T(1) - y[i] * y[i]);
  });
}

template <typename T>
Var<T> concat_cols(std::span<const Var<T>> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no parts");
  Graph<T>* g = parts[0].graph;
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  for (const Var<T>& p : parts) {
    require_same_graph(parts[0], p, "concat_cols");
    if (p.rows() != rows) {
      throw DimensionError("concat_cols: row mismatch " + parts[0].value().shape_string() +
                           " vs " + p.value().shape_string());
    }
    cols += p.cols();
    ids.push_back(p.id);
  }
  Tensor<T> out(rows, cols);
  std::size_t offset = 0;
  for (const Var<T>& p : parts) {
    const Tensor<T>& pv = p.value();
    for (std::size_t i = 0; i < rows; ++i)
      std::copy(pv.row_span(i).begin(), pv.row_span(i).end(), &out(i, offset));
    offset += pv.cols();
  }
  return g->record(std::move(out), ids, [ids](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const std::size_t w = g.value(id).cols();
      if (g.needs_grad(id)) {
        Tensor<T>& dp = g.grad(id);
        for (std::size_t i = 0; i < dp.rows(); ++i)
          for (std::size_t j = 0; j < w; ++j) dp(i, j) += d(i, offset + j);
      }
      offset += w;
    }
  });
}

template <typename T>
Var<T> concat_rows(std::span<const Var<T>> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no parts");
  Graph<T>* g = parts[0].graph;
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  std::vector<std::size_t> ids;
  for (const Var<T>& p : parts) {
    require_same_graph(parts[0], p, "concat_rows");
    if (p.cols() != cols) {
      throw DimensionError("concat_rows: column mismatch " + parts[0].value().shape_string() +
                           " vs " + p.value().shape_string());
    }
    rows += p.rows();
    ids.push_back(p.id);
  }
  std::vector<T> values;
  values.reserve(rows * cols);
  for (const Var<T>& p : parts) {
    auto v = p.value().values();
    values.insert(values.end(), v.begin(), v.end());
  }
  return g->record(Tensor<T>(rows, cols, std::move(values)), ids, [ids](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const std::size_t n = g.value(id).size();
      if (g.needs_grad(id)) {
        Tensor<T>& dp = g.grad(id);
        for (std::size_t k = 0; k < n; ++k) dp[k] += d[offset + k];
      }
      offset += n;
    }
  });
}

template <typename T>
Var<T> slice_rows(Var<T> a, std::size_t begin, std::size_t count) {
  const Tensor<T>& av = a.value();
  if (begin + count > av.rows() || count == 0) {
    throw DimensionError("slice_rows: rows [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + av.shape_string());
  }
  const std::size_t cols = av.cols();
  std::vector<T> values(av.values().begin() + begin * cols, av.values().begin() + (begin + count) * cols);
  return a.graph->record(Tensor<T>(count, cols, std::move(values)), {a.id},
                         [ai = a.id, begin](Graph<T>& g, std::size_t self) {
                           const Tensor<T>& d = g.grad(self);
                           Tensor<T>& da = g.grad(ai);
                           const std::size_t off = begin * da.cols();
                           for (std::size_t k = 0; k < d.size(); ++k) da[off + k] += d[k];
                         });
}

template <typename T>
Var<T> slice_cols(Var<T> a, std::size_t begin, std::size_t count) {
  const Tensor<T>& av = a.value();
  if (begin + count > av.cols() || count == 0) {
    throw DimensionError("slice_cols: cols [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + av.shape_string());
  }
  Tensor<T> out(av.rows(), count);
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = av(i, begin + j);
  return a.graph->record(std::move(out), {a.id}, [ai = a.id, begin](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    Tensor<T>& da = g.grad(ai);
    for (std::size_t i = 0; i < d.rows(); ++i)
      for (std::size_t j = 0; j < d.cols(); ++j) da(i, begin + j) += d(i, j);
  });
}

template <typename T>
Var<T> gather_rows(Var<T> table, std::vector<std::size_t> indices) {
  const Tensor<T>& tv = table.value();
  Tensor<T> out(indices.size(), tv.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= tv.rows()) {
      throw DimensionError("gather_rows: index " + std::to_string(indices[i]) + " outside " +
                           tv.shape_string());
    }
    auto src = tv.row_span(indices[i]);
    std::copy(src.begin(), src.end(), out.row_span(i).begin());
  }
  return table.graph->record(std::move(out), {table.id},
                             [ti = table.id, idx = std::move(indices)](Graph<T>& g, std::size_t self) {
                               const Tensor<T>& d = g.grad(self);
                               Tensor<T>& dt = g.grad(ti);
                               for (std::size_t i = 0; i < idx.size(); ++i)
                                 for (std::size_t j = 0; j < d.cols(); ++j) dt(idx[i], j) += d(i, j);
                             });
}

template <typename T>
Var<T> gather_elements(Var<T> a, std::vector<std::pair<std::size_t, std::size_t>> coords) {
  const Tensor<T>& av = a.value();
  Tensor<T> out(coords.size(), 1);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    auto [r, c] = coords[k];
    if (r >= av.rows() || c >= av.cols()) {
      throw DimensionError("gather_elements: (" + std::to_string(r) + ", " + std::to_string(c) +
                           ") outside " + av.shape_string());
    }
    out[k] = av(r, c);
  }
  return a.graph->record(std::move(out), {a.id},
                         [ai = a.id, cs = std::move(coords)](Graph<T>& g, std::size_t self) {
                           const Tensor<T>& d = g.grad(self);
                           Tensor<T>& da = g.grad(ai);
                           for (std::size_t k = 0; k < cs.size(); ++k) da(cs[k].first, cs[k].second) += d[k];
                         });
}

template <typename T>
Var<T> segment_max_rows(Var<T> a, std::size_t segment) {
  const Tensor<T>& av = a.value();
  if (segment == 0 || av.rows() % segment != 0) {
    throw DimensionError("segment_max_rows: " + av.shape_string() + " not divisible into segments of " +
                         std::to_string(segment));
  }
  const std::size_t groups = av.rows() / segment, cols = av.cols();
  Tensor<T> out(groups, cols);
  std::vector<std::size_t> argmax(groups * cols);
  for (std::size_t gi = 0; gi < groups; ++gi) {
    for (std::size_t j = 0; j < cols; ++j) {
      std::size_t best = gi * segment;
      for (std::size_t r = best + 1; r < (gi + 1) * segment; ++r) {
        if (av(r, j) > av(best, j)) best = r;
      }
      out(gi, j) = av(best, j);
      argmax[gi * cols + j] = best;
    }
  }
  return a.graph->record(std::move(out), {a.id},
                         [ai = a.id, arg = std::move(argmax)](Graph<T>& g, std::size_t self) {
                           const Tensor<T>& d = g.grad(self);
                           Tensor<T>& da = g.grad(ai);
                           const std::size_t cols = d.cols();
                           for (std::size_t k = 0; k < d.size(); ++k) da(arg[k], k % cols) += d[k];
                         });
}

template <typename T>
Var<T> max_over_time(Var<T> a) {
  return segment_max_rows(a, a.rows());
}

template <typename T>
Var<T> rowwise_softmax(Var<T> a) {
  const Tensor<T>& av = a.value();
  if (!av.all_finite()) throw DataError("rowwise_softmax: non-finite input");
  Tensor<T> out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    auto row = av.row_span(i);
    const T hi = *std::max_element(row.begin(), row.end());
    T total = T(0);
    for (std::size_t j = 0; j < row.size(); ++j) total += out(i, j) = std::exp(row[j] - hi);
    for (std::size_t j = 0; j < row.size(); ++j) out(i, j) /= total;
  }
  return a.graph->record(std::move(out), {a.id}, [ai = a.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    const Tensor<T>& y = g.value(self);
    Tensor<T>& da = g.grad(ai);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      T dot = T(0);
      for (std::size_t j = 0; j < y.cols(); ++j) dot += d(i, j) * y(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j) da(i, j) += y(i, j) * (d(i, j) - dot);
    }
  });
}

template <typename T>
Var<T> rowwise_log_softmax(Var<T> a) {
  const Tensor<T>& av = a.value();
  if (!av.all_finite()) throw DataError("rowwise_log_softmax: non-finite input");
  Tensor<T> out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    const T lse = log_sum_exp(av.row_span(i));
    for (std::size_t j = 0; j < av.cols(); ++j) out(i, j) = av(i, j) - lse;
  }
  return a.graph->record(std::move(out), {a.id}, [ai = a.id](Graph<T>& g, std::size_t self) {
    const Tensor<T>& d = g.grad(self);
    const Tensor<T>& y = g.value(self);
    Tensor<T>& da = g.grad(ai);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      T total = T(0);
      for (std::size_t j = 0; j < y.cols(); ++j) total += d(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j) da(i, j) += d(i, j) - std::exp(y(i, j)) * total;
    }
  });
}

template <typename T>
Var<T> sum(Var<T> a) {
  T total = T(0);
  for (T v : a.value().values()) total += v;
  return a.graph->record(Tensor<T>::scalar(total), {a.id}, [ai = a.id](Graph<T>& g, std::size_t self) {
    const T d = g.grad(self)[0];
    for (T& v : g.grad(ai).values()) v += d;
  });
}

template <typename T>
Var<T> mean(Var<T> a) {
  if (a.value().empty()) throw DimensionError("mean: empty tensor");
  return scale(sum(a), T(1) / static_cast<T>(a.value().size()));
}

template <typename T>
Var<T> crf_log_partition(Var<T> scores, Var<T> transitions) {
  require_same_graph(scores, transitions, "crf_log_partition");
  const Tensor<T>& e = scores.value();
  const Tensor<T>& tr = transitions.value();
  const std::size_t n = e.rows(), k = e.cols();
  if (n == 0 || k == 0) throw DimensionError("crf_log_partition: empty scores " + e.shape_string());
  if (tr.rows() != k + 2 || tr.cols() != k + 2) {
    throw DimensionError("crf_log_partition: transitions " + tr.shape_string() + " do not match " +
                         std::to_string(k) + " tags (+START/STOP)");
  }
  const std::size_t start = k, stop = k + 1;
  // alpha(t, j): log-sum over prefixes ending in tag j at t, emission included.
  Tensor<T> alpha(n, k);
  std::vector<T> buf(k);
  for (std::size_t j = 0; j < k; ++j) alpha(0, j) = tr(start, j) + e(0, j);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < k; ++i) buf[i] = alpha(t - 1, i) + tr(i, j);
      alpha(t, j) = log_sum_exp<T>(buf) + e(t, j);
    }
  }
  for (std::size_t j = 0; j < k; ++j) buf[j] = alpha(n - 1, j) + tr(j, stop);
  const T log_z = log_sum_exp<T>(buf);

  return scores.graph->record(
      Tensor<T>::scalar(log_z), {scores.id, transitions.id},
      [si = scores.id, ti = transitions.id, alpha = std::move(alpha), log_z](Graph<T>& g, std::size_t self) {
        const T d = g.grad(self)[0];
        const Tensor<T>& e = g.value(si);
        const Tensor<T>& tr = g.value(ti);
        const std::size_t n = e.rows(), k = e.cols(), start = k, stop = k + 1;
        // beta(t, i): log-sum over suffixes after position t given tag i at t.
        Tensor<T> beta(n, k);
        std::vector<T> buf(k);
        for (std::size_t i = 0; i < k; ++i) beta(n - 1, i) = tr(i, stop);
        for (std::size_t t = n - 1; t-- > 0;) {
          for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) buf[j] = tr(i, j) + e(t + 1, j) + beta(t + 1, j);
            beta(t, i) = log_sum_exp<T>(buf);
          }
        }
        const bool want_e = g.needs_grad(si), want_tr = g.needs_grad(ti);
        if (want_e) {
          Tensor<T>& de = g.grad(si);
          for (std::size_t t = 0; t < n; ++t)
            for (std::size_t j = 0; j < k; ++j) de(t, j) += d * std::exp(alpha(t, j) + beta(t, j) - log_z);
        }
        if (want_tr) {
          Tensor<T>& dtr = g.grad(ti);
          for (std::size_t j = 0; j < k; ++j) {
            dtr(start, j) += d * std::exp(alpha(0, j) + beta(0, j) - log_z);
            dtr(j, stop) += d * std::exp(alpha(n - 1, j) + beta(n - 1, j) - log_z);
          }
          for (std::size_t t = 1; t < n; ++t)
            for (std::size_t i = 0; i < k; ++i)
              for (std::size_t j = 0; j < k; ++j)
                dtr(i, j) += d * std::exp(alpha(t - 1, i) + tr(i, j) + e(t, j) + beta(t, j) - log_z);
        }
      });
}

template <typename T>
Tensor<T> dropout_mask(std::size_t width, double rate, std::uint64_t mask_seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate " + std::to_string(rate) + " outside [0, 1)");
  }
  Tensor<T> mask(1, width, T(1));
  if (rate == 0.0) return mask;
  Rng rng(mask_seed);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  for (std::size_t j = 0; j < width; ++j) mask[j] = rng.bernoulli(1.0 - rate) ? keep_scale : T(0);
  return mask;
}

template <typename T>
Var<T> variational_dropout(Var<T> a, double rate, std::uint64_t mask_seed, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate " + std::to_string(rate) + " outside [0, 1)");
  }
  if (!training || rate == 0.0) return a;
  Var<T> mask = a.graph->constant(dropout_mask<T>(a.cols(), rate, mask_seed));
  return mul_row(a, mask);
}

#define CROSSNER_INSTANTIATE_OPS(T)                                                         \
  template Var<T> matmul(Var<T>, Var<T>);                                                   \
  template Var<T> transpose(Var<T>);                                                        \
  template Var<T> add(Var<T>, Var<T>);                                                      \
  template Var<T> sub(Var<T>, Var<T>);                                                      \
  template Var<T> mul(Var<T>, Var<T>);                                                      \
  template Var<T> add_row(Var<T>, Var<T>);                                                  \
  template Var<T> mul_row(Var<T>, Var<T>);                                                  \
  template Var<T> scale(Var<T>, T);                                                         \
  template Var<T> sigmoid(Var<T>);                                                          \
  template Var<T> tanh(Var<T>);                                                             \
  template Var<T> concat_cols(std::span<const Var<T>>);                                     \
  template Var<T> concat_rows(std::span<const Var<T>>);                                     \
  template Var<T> slice_rows(Var<T>, std::size_t, std::size_t);                             \
  template Var<T> slice_cols(Var<T>, std::size_t, std::size_t);                             \
  template Var<T> gather_rows(Var<T>, std::vector<std::size_t>);                            \
  template Var<T> gather_elements(Var<T>, std::vector<std::pair<std::size_t, std::size_t>>); \
  template Var<T> segment_max_rows(Var<T>, std::size_t);                                    \
  template Var<T> max_over_time(Var<T>);                                                    \
  template Var<T> rowwise_softmax(Var<T>);                                                  \
  template Var<T> rowwise_log_softmax(Var<T>);                                              \
  template Var<T> sum(Var<T>);                                                              \
  template Var<T> mean(Var<T>);                                                             \
  template Var<T> crf_log_partition(Var<T>, Var<T>);                                        \
  template Var<T> variational_dropout(Var<T>, double, std::uint64_t, bool);                 \
  template Tensor<T> dropout_mask<T>(std::size_t, double, std::uint64_t);

CROSSNER_INSTANTIATE_OPS(float)
CROSSNER_INSTANTIATE_OPS(double)

}  // namespace crossner::ops
