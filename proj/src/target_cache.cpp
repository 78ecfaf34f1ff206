#include "photonic_forge/target_cache.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "photonic_forge/errors.hpp"

namespace pforge {

namespace {

static_assert(sizeof(double) == 8, "f64 cache entries need 64-bit doubles");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    bytes(b, 8);
  }
  void i32(std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    unsigned char b[4];
    for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(u >> (8 * k));
    bytes(b, 4);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(const std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(v.data(), v.size() * sizeof(double));
    } else {
      for (double d : v) f64(d);
    }
  }
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  void bytes(void* p, std::size_t n) {
    if (n > data_.size() - pos_) throw ParseError("target cache: truncated file");
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
    return v;
  }
  std::int32_t i32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | b[k];
    return static_cast<std::int32_t>(v);
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<double> f64s(std::size_t n) {
    if (n > (data_.size() - pos_) / 8) throw ParseError("target cache: truncated file");
    std::vector<double> v(n);
    if constexpr (std::endian::native == std::endian::little) {
      bytes(v.data(), n * 8);
    } else {
      for (double& d : v) d = f64();
    }
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string target_cache_name(const std::string& key) {
  std::ostringstream os;
  os << "targets-" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(key) << ".pftc";
  return os.str();
}

void write_target_cache(std::ostream& os, const std::string& key, const std::vector<FieldRecord>& records) {
  Writer w;
  w.bytes(kTargetCacheMagic.data(), kTargetCacheMagic.size());
  w.u64(fnv1a64(key));
  w.u64(key.size());
  w.bytes(key.data(), key.size());
  w.u64(records.size());
  for (const FieldRecord& r : records) {
    w.u64(r.regions.size());
    for (const CellRect& c : r.regions) {
      w.i32(c.i0);
      w.i32(c.j0);
      w.i32(c.i1);
      w.i32(c.j1);
    }
    w.u64(r.cells);
    w.u64(r.samples);
    w.f64(r.dt);
    w.f64s(r.ez_t);
    w.f64s(r.bx_t);
    w.f64s(r.by_t);
  }
  const std::uint64_t sum = fnv1a64(w.str());
  w.u64(sum);
  os.write(w.str().data(), static_cast<std::streamsize>(w.str().size()));
  if (!os) throw Error("target cache: write failed");
}

std::vector<FieldRecord> read_target_cache(std::istream& is, const std::string& key) {
  const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (data.size() < kTargetCacheMagic.size() + 8 || data.compare(0, kTargetCacheMagic.size(), kTargetCacheMagic) != 0)
    throw ParseError("target cache: bad header");
  const std::string_view body(data.data(), data.size() - 8);
  Reader tail(std::string_view(data).substr(data.size() - 8));
  if (tail.u64() != fnv1a64(body)) throw ParseError("target cache: checksum mismatch");

  Reader r(body);
  char magic[8];
  r.bytes(magic, 8);
  if (r.u64() != fnv1a64(key)) throw ParseError("target cache: key hash mismatch");
  const std::uint64_t key_len = r.u64();
  if (key_len != key.size()) throw ParseError("target cache: key mismatch");
  std::string stored(key_len, '\0');
  r.bytes(stored.data(), key_len);
  if (stored != key) throw ParseError("target cache: key mismatch");

  const std::uint64_t count = r.u64();
  if (count > 1024) throw ParseError("target cache: implausible record count");
  std::vector<FieldRecord> out(count);
  for (FieldRecord& rec : out) {
    const std::uint64_t regions = r.u64();
    if (regions > 1024) throw ParseError("target cache: implausible region count");
    for (std::uint64_t k = 0; k < regions; ++k) {
      CellRect c;
      c.i0 = r.i32();
      c.j0 = r.i32();
      c.i1 = r.i32();
      c.j1 = r.i32();
      rec.regions.push_back(c);
    }
    rec.cells = r.u64();
    rec.samples = r.u64();
    rec.dt = r.f64();
    std::size_t expect = 0;
    for (const CellRect& c : rec.regions) expect += static_cast<std::size_t>(c.cells());
    if (expect != rec.cells) throw ParseError("target cache: region cells do not add up");
    if (rec.samples != 0 && rec.cells > body.size() / rec.samples) throw ParseError("target cache: truncated file");
    const std::size_t n = rec.cells * rec.samples;
    rec.ez_t = r.f64s(n);
    rec.bx_t = r.f64s(n);
    rec.by_t = r.f64s(n);
  }
  if (r.pos() != body.size()) throw ParseError("target cache: trailing bytes");
  return out;
}

CachedTargets cached_targets(const std::string& dir, const SimulationSetup& setup, const UnitarySpec& gate,
                             int workers, const CacheLog& log) {
  namespace fs = std::filesystem;
  const std::string key = target_key(setup, gate);
  CachedTargets out;
  out.path = (fs::path(dir) / target_cache_name(key)).string();
  if (fs::exists(out.path)) {
    try {
      std::ifstream is(out.path, std::ios::binary);
      out.records = read_target_cache(is, key);
      if (static_cast<int>(out.records.size()) != gate.n()) throw ParseError("target cache: wrong record count");
      out.hit = true;
      if (log) log("target cache hit: " + out.path);
      return out;
    } catch (const ParseError& e) {
      if (log) log(std::string("warning: ") + e.what() + "; regenerating " + out.path);
    }
  }
  out.records = make_targets(setup, gate, workers);
  fs::create_directories(fs::path(out.path).parent_path().empty() ? fs::path(".") : fs::path(out.path).parent_path());
  const std::string tmp = out.path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp);
    write_target_cache(os, key, out.records);
  }
  fs::rename(tmp, out.path);
  if (log) log("target cache written: " + out.path);
  return out;
}

}  // namespace pforge
