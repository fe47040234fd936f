#include "hk/taylor.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace hk {

namespace {

std::string key_of(const std::uint8_t* e, int nv) { return std::string(reinterpret_cast<const char*>(e), nv); }

void gen_degree(int nv, int d, int v, std::vector<std::uint8_t>& cur, std::vector<std::uint8_t>& out) {
  if (v == nv - 1) {
    cur[v] = static_cast<std::uint8_t>(d);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur[v] = static_cast<std::uint8_t>(e);
    gen_degree(nv, d - e, v + 1, cur, out);
  }
}

}  // namespace

TaylorSpace::TaylorSpace(int nvars, int order) : nv_(nvars), order_(order) {
  if (nvars < 1 || order < 0 || order > 40) throw std::invalid_argument("bad Taylor space dimensions");
  offs_.push_back(0);
  std::vector<std::uint8_t> cur(nv_, 0);
  for (int d = 0; d <= order_; ++d) {
    gen_degree(nv_, d, 0, cur, exps_);
    offs_.push_back(exps_.size() / nv_);
  }
  std::size_t n = offs_.back();
  degs_.resize(n);
  fw_.resize(n);
  lookup_.reserve(n);
  for (std::size_t m = 0; m < n; ++m) {
    int dsum = 0;
    double w = 1.0;
    for (int v = 0; v < nv_; ++v) {
      int e = exps_[m * nv_ + v];
      dsum += e;
      for (int j = 2; j <= e; ++j) w *= j;
    }
    degs_[m] = dsum;
    fw_[m] = w;
    lookup_.emplace_back(key_of(&exps_[m * nv_], nv_), m);
  }
  std::sort(lookup_.begin(), lookup_.end());

  buckets_.resize((order_ + 1) * (order_ + 1));
  std::vector<std::uint8_t> sum(nv_);
  std::vector<int> ev(nv_);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < offs_[order_ - degs_[a] + 1]; ++b) {
      int da = degs_[a], db = degs_[b];
      for (int v = 0; v < nv_; ++v) ev[v] = exps_[a * nv_ + v] + exps_[b * nv_ + v];
      std::size_t c = index(ev);
      buckets_[da * (order_ + 1) + db].push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                                                   static_cast<std::uint32_t>(c)});
    }

  deriv_.resize(nv_);
  deriv_off_.assign(nv_, std::vector<std::size_t>(order_ + 1, 0));
  for (int v = 0; v < nv_; ++v) {
    for (std::size_t m = 0; m < n; ++m) {
      int e = exps_[m * nv_ + v];
      if (e == 0) continue;
      for (int w = 0; w < nv_; ++w) ev[w] = exps_[m * nv_ + w];
      ev[v] -= 1;
      deriv_[v].push_back({static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(index(ev)), double(e)});
    }
    // entries are generated in monomial order, which is degree order
    for (int dd = 1; dd <= order_; ++dd) {
      std::size_t cnt = 0;
      for (const auto& en : deriv_[v])
        if (degs_[en.src] <= dd) ++cnt;
      deriv_off_[v][dd] = cnt;
    }
  }
}

std::size_t TaylorSpace::index(const std::vector<int>& e) const {
  std::string k(nv_, '\0');
  for (int v = 0; v < nv_; ++v) {
    if (e[v] < 0 || e[v] > order_) throw std::out_of_range("monomial exponent outside Taylor space");
    k[v] = static_cast<char>(e[v]);
  }
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::make_pair(k, std::size_t(0)));
  if (it == lookup_.end() || it->first != k) throw std::out_of_range("monomial not in Taylor space");
  return it->second;
}

const TaylorSpace* TaylorSpace::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<TaylorSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot.reset(new TaylorSpace(nvars, order));
  return slot.get();
}

}  // namespace hk
