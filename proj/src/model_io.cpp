#include "rbws/model_io.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

namespace rbws {

namespace {

constexpr char kMagic[4] = {'R', 'B', 'W', 'S'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void matrix(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
  }
  void column(std::span<const double> v) {
    u64(v.size());
    u64(1);
    for (double x : v) f64(x);
  }
  template <class T>
  void indices(const std::vector<T>& v) {
    u64(v.size());
    for (T x : v) u64(static_cast<std::uint64_t>(x));
  }
  void header(ModelKind kind, std::uint64_t full, std::uint64_t n, std::uint64_t kmax) {
    out_.append(kMagic, 4);
    u32(kModelFormatVersion);
    u32(static_cast<std::uint32_t>(kind));
    u64(full);
    u64(n);
    u64(kmax);
  }
  std::string finish() {
    const std::uint64_t sum = fnv1a64(out_);
    u64(sum);
    return std::move(out_);
  }

 private:
  std::string out_;
};

class Reader {
 public:
  struct Header {
    ModelKind kind;
    std::uint64_t full, n, kmax;
  };

  explicit Reader(std::string_view bytes) : bytes_(bytes) {
    if (bytes.size() < 4 + 4 + 4 + 24 + 8) throw ModelFormatError("model file truncated");
    if (bytes.substr(0, 4) != std::string_view(kMagic, 4)) throw ModelFormatError("not a model file (bad magic)");
    end_ = bytes.size() - 8;
    pos_ = 4;
    const std::uint32_t version = u32();
    if (version != kModelFormatVersion) {
      throw ModelFormatError("unsupported model format version " + std::to_string(version));
    }
    pos_ = end_;
    const std::uint64_t stored = u64();
    if (stored != fnv1a64(bytes.substr(0, end_))) throw ModelFormatError("model checksum mismatch");
    pos_ = 8;
  }

  Header header(ModelKind expected) {
    Header h{static_cast<ModelKind>(u32()), u64(), u64(), u64()};
    if (h.kind != expected) throw ModelFormatError("model kind mismatch");
    return h;
  }
  ModelKind kind() {
    pos_ = 8;
    return static_cast<ModelKind>(u32());
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }

  Eigen::MatrixXd matrix() {
    const std::uint64_t rows = u64(), cols = u64();
    if (rows != 0 && cols > (end_ - pos_) / 8 / rows) throw ModelFormatError("model file truncated");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = f64();
    return m;
  }
  std::vector<double> column() {
    const Eigen::MatrixXd m = matrix();
    if (m.cols() != 1 && m.size() != 0) throw ModelFormatError("expected a column vector");
    return std::vector<double>(m.data(), m.data() + m.size());
  }
  template <class T>
  std::vector<T> indices() {
    const std::uint64_t len = u64();
    if (len > (end_ - pos_) / 8) throw ModelFormatError("model file truncated");
    std::vector<T> v(len);
    for (auto& x : v) x = static_cast<T>(u64());
    return v;
  }
  void done() const {
    if (pos_ != end_) throw ModelFormatError("trailing bytes in model file");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > (pos_ >= end_ ? bytes_.size() : end_)) throw ModelFormatError("model file truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

void check(bool ok, const char* what) {
  if (!ok) throw ModelFormatError(std::string("inconsistent model: ") + what);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string encode_model(const PodBasis& model) {
  Writer w;
  w.header(ModelKind::pod, model.basis.rows(), model.dimension(), 0);
  w.matrix(model.basis);
  w.column(model.eigenvalues);
  w.indices(std::vector<int>{model.snapshot_count});
  return w.finish();
}

std::string encode_model(const L1rocModel& model) {
  Writer w;
  w.header(ModelKind::l1roc, model.basis.rows(), model.dimension(), 0);
  w.matrix(model.basis);
  w.matrix(model.snapshot_transform);
  const std::size_t p = model.parameters.empty() ? 0 : model.parameters.front().values.size();
  Eigen::MatrixXd params(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(model.parameters.size()));
  for (std::size_t j = 0; j < model.parameters.size(); ++j) {
    check(model.parameters[j].values.size() == p, "parameter dimensions differ");
    for (std::size_t i = 0; i < p; ++i) params(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = model.parameters[j].values[i];
  }
  w.matrix(params);
  w.column(model.indicator_history);
  w.indices(model.solution_points);
  w.indices(model.residual_points);
  w.indices(std::vector<int>{model.saturated ? 1 : 0});
  return w.finish();
}

std::string encode_model(const MsrbHierarchy& model) {
  Writer w;
  check(model.residual_spectra.size() == model.iteration_bases.size(), "one spectrum per iteration space");
  Index full = static_cast<Index>(model.initial.basis.rows());
  for (const auto& b : model.iteration_bases) full = std::max(full, static_cast<Index>(b.rows()));
  w.header(ModelKind::msrb, full, model.rb_dimension, model.iteration_bases.size());
  w.matrix(model.initial.basis);
  w.column(model.initial.eigenvalues);
  for (const auto& b : model.iteration_bases) w.matrix(b);
  for (const auto& s : model.residual_spectra) w.column(s);
  w.column(std::vector<double>{model.max_error_equation_residual});
  w.indices(std::vector<int>{model.initial.snapshot_count, static_cast<int>(model.smoother)});
  return w.finish();
}

ModelKind peek_model_kind(std::string_view bytes) {
  Reader r(bytes);
  return r.kind();
}

PodBasis decode_pod(std::string_view bytes) {
  Reader r(bytes);
  const auto h = r.header(ModelKind::pod);
  PodBasis m;
  m.basis = r.matrix();
  m.eigenvalues = r.column();
  const auto extra = r.indices<int>();
  r.done();
  check(extra.size() == 1, "pod metadata");
  m.snapshot_count = extra[0];
  check(static_cast<std::uint64_t>(m.basis.cols()) == h.n, "pod N");
  check(m.basis.size() == 0 || static_cast<std::uint64_t>(m.basis.rows()) == h.full, "pod size");
  return m;
}

L1rocModel decode_l1roc(std::string_view bytes) {
  Reader r(bytes);
  const auto h = r.header(ModelKind::l1roc);
  L1rocModel m;
  m.basis = r.matrix();
  m.snapshot_transform = r.matrix();
  const Eigen::MatrixXd params = r.matrix();
  m.indicator_history = r.column();
  m.solution_points = r.indices<Index>();
  m.residual_points = r.indices<Index>();
  const auto flags = r.indices<int>();
  r.done();
  check(flags.size() == 1, "l1roc flags");
  m.saturated = flags[0] != 0;
  for (Eigen::Index j = 0; j < params.cols(); ++j) {
    ParamPoint p;
    p.values.assign(params.col(j).data(), params.col(j).data() + params.rows());
    m.parameters.push_back(std::move(p));
  }
  const auto n = static_cast<std::size_t>(m.basis.cols());
  check(n == h.n && static_cast<std::uint64_t>(m.basis.rows()) == h.full, "l1roc header");
  check(m.solution_points.size() == n && m.residual_points.size() + 1 == std::max<std::size_t>(n, 1), "point counts");
  check(m.snapshot_transform.rows() == static_cast<Eigen::Index>(n) && m.snapshot_transform.cols() == static_cast<Eigen::Index>(n), "transform shape");
  for (Index idx : m.collocation_points()) check(idx >= 0 && idx < m.full_size(), "point index");
  return m;
}

MsrbHierarchy decode_msrb(std::string_view bytes) {
  Reader r(bytes);
  const auto h = r.header(ModelKind::msrb);
  MsrbHierarchy m;
  m.rb_dimension = static_cast<int>(h.n);
  m.initial.basis = r.matrix();
  m.initial.eigenvalues = r.column();
  for (std::uint64_t k = 0; k < h.kmax; ++k) m.iteration_bases.push_back(r.matrix());
  for (std::uint64_t k = 0; k < h.kmax; ++k) m.residual_spectra.push_back(r.column());
  const auto bound = r.column();
  const auto extra = r.indices<int>();
  r.done();
  check(bound.size() == 1 && extra.size() == 2, "msrb metadata");
  m.max_error_equation_residual = bound[0];
  m.initial.snapshot_count = extra[0];
  check(extra[1] >= 0 && extra[1] <= static_cast<int>(SmootherKind::gauss_seidel_symmetric), "smoother");
  m.smoother = static_cast<SmootherKind>(extra[1]);
  for (const auto& b : m.iteration_bases) {
    check(b.size() == 0 || static_cast<std::uint64_t>(b.rows()) == h.full, "iteration basis size");
  }
  return m;
}

template <class Model>
void save_model(const Model& model, const std::filesystem::path& path) {
  const std::string bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

template void save_model<PodBasis>(const PodBasis&, const std::filesystem::path&);
template void save_model<L1rocModel>(const L1rocModel&, const std::filesystem::path&);
template void save_model<MsrbHierarchy>(const MsrbHierarchy&, const std::filesystem::path&);

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PodBasis load_pod(const std::filesystem::path& path) { return decode_pod(read_file(path)); }
L1rocModel load_l1roc(const std::filesystem::path& path) { return decode_l1roc(read_file(path)); }
MsrbHierarchy load_msrb(const std::filesystem::path& path) { return decode_msrb(read_file(path)); }

}  // namespace rbws
