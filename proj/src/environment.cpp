#include "oy/environment.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "oy/rng.hpp"

namespace oy {

TimeGrid::TimeGrid(double t_min_, double t_max_, double step_) : t_min(t_min_), t_max(t_max_), step(step_) {
  if (!(step > 0.0)) throw GridError("grid step must be positive");
  if (!(t_min < t_max)) throw GridError("grid requires t_min < t_max");
  init();
}

void TimeGrid::init() {
  const double span = (t_max - t_min) / step;
  const double k = std::round(span);
  if (std::abs(span - k) > 1e-9 * std::max(1.0, k))
    throw GridError("grid span (t_max - t_min) is not a multiple of the step");
  n_points = static_cast<std::size_t>(k) + 1;
  offset_ = std::llround(t_min / step);
}

std::size_t TimeGrid::index(double t) const {
  const double x = (t - t_min) / step;
  const double k = std::round(x);
  if (std::abs(x - k) > 1e-9 || k < 0 || k > static_cast<double>(n_points - 1)) {
    std::ostringstream msg;
    msg << "time " << t << " is not a grid point of [" << t_min << ", " << t_max << "] step " << step;
    throw GridError(msg.str());
  }
  return static_cast<std::size_t>(k);
}

bool TimeGrid::contains(double t) const {
  const double x = (t - t_min) / step;
  const double k = std::round(x);
  return std::abs(x - k) <= 1e-9 && k >= 0 && k <= static_cast<double>(n_points - 1);
}

TimeGrid TimeGrid::window(double a, double b) const {
  return TimeGrid(time(index(a)), time(index(b)), step);
}

bool TimeGrid::same_as(const TimeGrid& o) const {
  return n_points == o.n_points && std::abs(step - o.step) <= 1e-12 * step &&
         std::abs(t_min - o.t_min) <= 1e-9 * step;
}

std::size_t& environment_memory_budget() {
  static std::size_t budget = std::size_t{1} << 27;  // 1 GiB of doubles
  return budget;
}

namespace {

// Increments are rounded to this quantum so path values are exact dyadic
// sums: differences, sums of adjacent increments and re-pinning are exact.
constexpr double kQuantum = 0x1.0p-36;

void check_budget(std::size_t levels, std::size_t points) {
  if (levels * points > environment_memory_budget()) {
    std::ostringstream msg;
    msg << "environment of " << levels << " levels x " << points << " points exceeds memory budget of "
        << environment_memory_budget() << " values";
    throw MemoryBudgetError(msg.str());
  }
}

std::vector<double> generate_path(std::uint64_t seed, const TimeGrid& grid, int level) {
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const double sd = std::sqrt(grid.step);
  const std::size_t n = grid.n_points;
  std::vector<double> path(n);
  path[0] = 0.0;
  // block b covers absolute increments 2b, 2b+1; both normals come from one draw
  double acc = 0.0;
  std::int64_t cached = std::numeric_limits<std::int64_t>::min();
  double pair[2] = {0.0, 0.0};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::int64_t a = grid.absolute(k);
    const std::int64_t block = a >= 0 ? a / 2 : -((-a + 1) / 2);
    if (block != cached) {
      const auto ub = static_cast<std::uint64_t>(block);
      const auto out = philox4x32({static_cast<std::uint32_t>(ub), static_cast<std::uint32_t>(ub >> 32),
                                   static_cast<std::uint32_t>(level), 0u},
                                  key);
      const double u1 = uniform53_open0(out[0], out[1]);
      const double u2 = uniform53_open0(out[2], out[3]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      pair[0] = radius * std::cos(angle);
      pair[1] = radius * std::sin(angle);
      cached = block;
    }
    acc += std::round(pair[a - 2 * block] * sd / kQuantum) * kQuantum;
    path[k + 1] = acc;
  }
  return path;
}

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("environment file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& os, double x) { write_u64(os, std::bit_cast<std::uint64_t>(x)); }
double read_f64(std::istream& is) { return std::bit_cast<double>(read_u64(is)); }

constexpr char kMagic[8] = {'O', 'Y', 'E', 'N', 'V', '0', '0', '1'};

}  // namespace

Environment Environment::generate(std::uint64_t seed, const TimeGrid& grid, int level_lo, int level_hi) {
  if (level_hi < level_lo) throw std::invalid_argument("environment level range is empty");
  const std::size_t levels = static_cast<std::size_t>(level_hi - level_lo + 1);
  check_budget(levels, grid.n_points);
  Environment env;
  env.seed_ = seed;
  env.grid_ = grid;
  env.level_lo_ = level_lo;
  env.level_hi_ = level_hi;
  env.paths_.resize(levels);
  const bool pin_zero = grid.contains(0.0);
  const std::size_t k0 = pin_zero ? grid.index(0.0) : 0;
  for (std::size_t l = 0; l < levels; ++l) {
    auto path = generate_path(seed, grid, level_lo + static_cast<int>(l));
    const double origin = path[k0];
    for (double& v : path) v -= origin;
    env.paths_[l] = std::move(path);
  }
  return env;
}

Environment Environment::zero(const TimeGrid& grid, int level_lo, int level_hi) {
  if (level_hi < level_lo) throw std::invalid_argument("environment level range is empty");
  const std::size_t levels = static_cast<std::size_t>(level_hi - level_lo + 1);
  check_budget(levels, grid.n_points);
  Environment env;
  env.grid_ = grid;
  env.level_lo_ = level_lo;
  env.level_hi_ = level_hi;
  env.paths_.assign(levels, std::vector<double>(grid.n_points, 0.0));
  return env;
}

Environment Environment::from_paths(const TimeGrid& grid, int level_lo, std::vector<std::vector<double>> paths,
                                    std::uint64_t seed) {
  if (paths.empty()) throw std::invalid_argument("environment level range is empty");
  for (const auto& p : paths)
    if (p.size() != grid.n_points) throw std::invalid_argument("path length does not match grid");
  check_budget(paths.size(), grid.n_points);
  Environment env;
  env.seed_ = seed;
  env.grid_ = grid;
  env.level_lo_ = level_lo;
  env.level_hi_ = level_lo + static_cast<int>(paths.size()) - 1;
  env.paths_ = std::move(paths);
  return env;
}

void Environment::check_level(int level) const {
  if (!has_level(level))
    throw std::out_of_range("level " + std::to_string(level) + " outside environment range [" +
                            std::to_string(level_lo_) + ", " + std::to_string(level_hi_) + "]");
}

const std::vector<double>& Environment::path(int level) const {
  check_level(level);
  return paths_[level - level_lo_];
}

double Environment::increment(int level, double s, double t) const {
  check_level(level);
  return increment_index(level, grid_.index(s), grid_.index(t));
}

Environment Environment::coarsen(int factor) const {
  if (factor < 1) throw std::invalid_argument("coarsen factor must be >= 1");
  if ((grid_.n_points - 1) % factor != 0) throw GridError("grid length not divisible by coarsening factor");
  TimeGrid g(grid_.t_min, grid_.t_max, grid_.step * factor);
  std::vector<std::vector<double>> paths(paths_.size());
  for (std::size_t l = 0; l < paths_.size(); ++l) {
    paths[l].resize(g.n_points);
    for (std::size_t k = 0; k < g.n_points; ++k) paths[l][k] = paths_[l][k * factor];
  }
  return from_paths(g, level_lo_, std::move(paths), seed_);
}

Environment Environment::window(double a, double b) const {
  const std::size_t ia = grid_.index(a), ib = grid_.index(b);
  TimeGrid g = grid_.window(a, b);
  std::vector<std::vector<double>> paths(paths_.size());
  for (std::size_t l = 0; l < paths_.size(); ++l) paths[l].assign(paths_[l].begin() + ia, paths_[l].begin() + ib + 1);
  return from_paths(g, level_lo_, std::move(paths), seed_);
}

// Header: magic, seed, t_min, t_max, step, n_points, level_lo, level_hi.
// Payload: B_i(t_min) then n_points-1 increments per level, LE f64.
void Environment::save(const std::string& file) const {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  os.write(kMagic, 8);
  write_u64(os, seed_);
  write_f64(os, grid_.t_min);
  write_f64(os, grid_.t_max);
  write_f64(os, grid_.step);
  write_u64(os, grid_.n_points);
  write_u64(os, static_cast<std::uint64_t>(static_cast<std::int64_t>(level_lo_)));
  write_u64(os, static_cast<std::uint64_t>(static_cast<std::int64_t>(level_hi_)));
  for (const auto& p : paths_) {
    write_f64(os, p[0]);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) write_f64(os, p[k + 1] - p[k]);
  }
  if (!os) throw std::runtime_error("write failed: " + file);
}

Environment Environment::load(const std::string& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + file);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error(file + ": bad magic");
  const std::uint64_t seed = read_u64(is);
  const double t_min = read_f64(is), t_max = read_f64(is), step = read_f64(is);
  const std::uint64_t n = read_u64(is);
  const int lo = static_cast<int>(static_cast<std::int64_t>(read_u64(is)));
  const int hi = static_cast<int>(static_cast<std::int64_t>(read_u64(is)));
  TimeGrid grid(t_min, t_max, step);
  if (grid.n_points != n) throw std::runtime_error(file + ": inconsistent grid header");
  if (hi < lo) throw std::runtime_error(file + ": empty level range");
  check_budget(static_cast<std::size_t>(hi - lo + 1), n);
  std::vector<std::vector<double>> paths(static_cast<std::size_t>(hi - lo + 1), std::vector<double>(n));
  for (auto& p : paths) {
    p[0] = read_f64(is);
    for (std::size_t k = 0; k + 1 < n; ++k) p[k + 1] = p[k] + read_f64(is);
  }
  return from_paths(grid, lo, std::move(paths), seed);
}

}  // namespace oy
