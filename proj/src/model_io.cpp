#include "synthograph/model_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

#include <zlib.h>

#include "synthograph/error.hpp"

namespace synthograph {

namespace {

constexpr std::string_view kMagic = "SYGM";
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 4 + 8;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  void matrix(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
  }
  void raw(std::string_view s) { buf_.append(s); }
  std::string take() { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  Eigen::MatrixXd matrix() {
    const std::uint64_t rows = u64();
    const std::uint64_t cols = u64();
    if (cols != 0 && rows > (bytes_.size() - pos_) / 8 / cols) throw ModelFormatError("model file truncated: matrix exceeds payload");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
    return m;
  }
  void expect_end() const {
    if (pos_ != bytes_.size()) throw ModelFormatError("model payload has trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ModelFormatError("model file truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(std::string_view payload) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
}

std::string wrap(ModelType type, std::uint32_t schema, std::string payload) {
  ByteWriter w;
  w.raw(kMagic);
  w.u32(kContainerVersion);
  w.u32(static_cast<std::uint32_t>(type));
  w.u32(schema);
  w.u64(payload.size());
  w.raw(payload);
  w.u32(checksum(payload));
  return w.take();
}

struct Unwrapped {
  ModelType type;
  std::uint32_t schema;
  std::string_view payload;
};

Unwrapped unwrap_any(std::string_view bytes) {
  if (bytes.size() < kHeaderSize) throw ModelFormatError("model file truncated: header incomplete");
  if (bytes.substr(0, 4) != kMagic) throw ModelFormatError("not a model file (bad magic)");
  ByteReader r(bytes.substr(4, kHeaderSize - 4));
  const std::uint32_t version = r.u32();
  if (version != kContainerVersion)
    throw ModelFormatError("unsupported model container version: expected " + std::to_string(kContainerVersion) +
                           ", found " + std::to_string(version));
  const std::uint32_t type = r.u32();
  if (type < 1 || type > 3) throw ModelFormatError("unknown model type tag " + std::to_string(type));
  const std::uint32_t schema = r.u32();
  const std::uint64_t size = r.u64();
  if (bytes.size() - kHeaderSize < 4 || size > bytes.size() - kHeaderSize - 4)
    throw ModelFormatError("model file truncated: payload incomplete");
  if (size != bytes.size() - kHeaderSize - 4) throw ModelFormatError("model file has trailing bytes");
  const std::string_view payload = bytes.substr(kHeaderSize, size);
  ByteReader tail(bytes.substr(kHeaderSize + size));
  if (tail.u32() != checksum(payload)) throw ModelFormatError("model file checksum mismatch (corrupt file)");
  return {static_cast<ModelType>(type), schema, payload};
}

std::string_view unwrap(std::string_view bytes, ModelType expected, std::uint32_t schema) {
  auto u = unwrap_any(bytes);
  if (u.type != expected)
    throw ModelFormatError("model type mismatch: expected " + std::string(model_type_name(expected)) + " model, found " +
                           std::string(model_type_name(u.type)) + " model");
  if (u.schema != schema)
    throw ModelFormatError("unsupported " + std::string(model_type_name(expected)) + " schema version: expected " +
                           std::to_string(schema) + ", found " + std::to_string(u.schema));
  return u.payload;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing model file '" + path.string() + "'");
}

}  // namespace

std::string_view model_type_name(ModelType t) {
  switch (t) {
    case ModelType::kScreener: return "screener";
    case ModelType::kTagger: return "tagger";
    case ModelType::kOrigin: return "origin";
  }
  return "unknown";
}

std::string serialize_model(const TaggerModel& m) {
  ByteWriter w;
  w.u8(m.kind == TaggerKind::kCrf ? 1 : 0);
  w.u8(m.bilou_constraints ? 1 : 0);
  w.u32(kNumEntityLabels);
  for (int i = 0; i < kNumEntityLabels; ++i) w.str(label_name(label_from_index(i)));
  w.str("BILU");
  w.u32(static_cast<std::uint32_t>(m.vectorizer.sparse_count()));
  for (const auto& n : m.vectorizer.names()) w.str(n);
  w.u32(static_cast<std::uint32_t>(m.vectorizer.embedding_dimension()));
  w.matrix(m.local);
  w.matrix(m.transition);
  return wrap(ModelType::kTagger, kTaggerSchemaVersion, w.take());
}

TaggerModel deserialize_tagger(std::string_view bytes) {
  ByteReader r(unwrap(bytes, ModelType::kTagger, kTaggerSchemaVersion));
  TaggerModel m;
  const std::uint8_t kind = r.u8();
  if (kind > 1) throw ModelFormatError("unknown tagger kind " + std::to_string(kind));
  m.kind = kind == 1 ? TaggerKind::kCrf : TaggerKind::kIndependent;
  m.bilou_constraints = r.u8() != 0;
  const std::uint32_t labels = r.u32();
  if (labels != kNumEntityLabels) throw ModelFormatError("label alphabet size mismatch: " + std::to_string(labels));
  for (int i = 0; i < kNumEntityLabels; ++i) {
    if (r.str() != label_name(label_from_index(i))) throw ModelFormatError("label alphabet mismatch at entry " + std::to_string(i));
  }
  if (r.str() != "BILU") throw ModelFormatError("unknown span encoding");
  const std::uint32_t n = r.u32();
  std::vector<std::string> names;
  names.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) names.push_back(r.str());
  const auto dim = static_cast<int>(r.u32());
  m.vectorizer = FeatureVectorizer(std::move(names), dim);
  m.local = r.matrix();
  m.transition = r.matrix();
  r.expect_end();
  if (m.local.cols() != m.vectorizer.width() || m.transition.rows() != m.local.rows() ||
      m.transition.cols() != m.local.rows())
    throw ModelFormatError("tagger weight shapes do not match the feature table");
  if (!m.local.allFinite() || !m.transition.allFinite()) throw ModelFormatError("tagger weights are not finite");
  return m;
}

std::string serialize_model(const ScreenerModel& m) {
  ByteWriter w;
  w.matrix(m.weights);
  w.f64(m.bias);
  return wrap(ModelType::kScreener, static_cast<std::uint32_t>(m.schema_version), w.take());
}

ScreenerModel deserialize_screener(std::string_view bytes) {
  ByteReader r(unwrap(bytes, ModelType::kScreener, kScreenerSchemaVersion));
  ScreenerModel m;
  const Eigen::MatrixXd w = r.matrix();
  if (w.cols() != 1 || w.rows() < kScreenerBinaryFeatures) throw ModelFormatError("screener weight vector has the wrong shape");
  m.weights = w.col(0);
  m.bias = r.f64();
  r.expect_end();
  return m;
}

std::string serialize_model(const OriginModel& m) {
  ByteWriter w;
  w.f64(m.gamma);
  w.f64(m.alpha);
  w.u32(static_cast<std::uint32_t>(m.vocabulary.size()));
  for (const auto& v : m.vocabulary) w.str(v);
  w.u32(static_cast<std::uint32_t>(m.emissions.size()));
  for (const auto& [op, row] : m.emissions) {
    w.str(op);
    w.matrix(row);
  }
  return wrap(ModelType::kOrigin, kOriginSchemaVersion, w.take());
}

OriginModel deserialize_origin(std::string_view bytes) {
  ByteReader r(unwrap(bytes, ModelType::kOrigin, kOriginSchemaVersion));
  OriginModel m;
  m.gamma = r.f64();
  m.alpha = r.f64();
  const std::uint32_t v = r.u32();
  for (std::uint32_t i = 0; i < v; ++i) m.vocabulary.push_back(r.str());
  const std::uint32_t rows = r.u32();
  for (std::uint32_t i = 0; i < rows; ++i) {
    std::string op = r.str();
    const Eigen::MatrixXd row = r.matrix();
    if (row.cols() != 1 || row.rows() != static_cast<Eigen::Index>(m.vocabulary.size()))
      throw ModelFormatError("origin emission row has the wrong shape");
    m.emissions[op] = row.col(0);
  }
  r.expect_end();
  if (!(m.gamma > 0 && m.gamma < 1)) throw ModelFormatError("origin model gamma outside (0, 1)");
  return m;
}

ModelType peek_model_type(std::string_view bytes) { return unwrap_any(bytes).type; }

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_model(const std::filesystem::path& path, const TaggerModel& m) { write_file(path, serialize_model(m)); }
void save_model(const std::filesystem::path& path, const ScreenerModel& m) { write_file(path, serialize_model(m)); }
void save_model(const std::filesystem::path& path, const OriginModel& m) { write_file(path, serialize_model(m)); }

TaggerModel load_tagger_model(const std::filesystem::path& path) { return deserialize_tagger(read_file_bytes(path)); }
ScreenerModel load_screener_model(const std::filesystem::path& path) {
  return deserialize_screener(read_file_bytes(path));
}
OriginModel load_origin_model(const std::filesystem::path& path) { return deserialize_origin(read_file_bytes(path)); }

}  // namespace synthograph
