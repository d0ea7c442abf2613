#include "elfd/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace elfd {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(bytes, sizeof(U));
}

template <typename T>
T get_le(std::istream& in, const char* field) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw ParseError(std::string("dictionary: truncated while reading ") + field);
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

std::string join_ints(const std::vector<int>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(values[i]);
  }
  return s;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError("manifest: missing key '" + key + "'");
  return it->second;
}

int to_int(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("manifest: invalid integer for '" + key + "': " + s);
  }
}

std::filesystem::path scale_dir(const std::filesystem::path& root, int scale) {
  return root / ("scale_" + std::to_string(scale));
}

}  // namespace

void write_dictionary(const Dictionary& dict, std::ostream& out) {
  out.write(kDictionaryMagic, sizeof(kDictionaryMagic));
  put_le(out, static_cast<std::uint32_t>(dict.dimension()));
  put_le(out, static_cast<std::uint32_t>(dict.size()));
  const Eigen::MatrixXd& cols = dict.columns();  // column-major storage
  for (Eigen::Index i = 0; i < cols.size(); ++i) put_le(out, cols.data()[i]);
  for (int id : dict.class_ids()) put_le(out, static_cast<std::int32_t>(id));
}

Dictionary read_dictionary(std::istream& in, int class_count) {
  char magic[sizeof(kDictionaryMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kDictionaryMagic, sizeof(magic)) != 0) {
    throw ParseError("dictionary: bad magic");
  }
  const auto d = get_le<std::uint32_t>(in, "dimension");
  const auto n = get_le<std::uint32_t>(in, "column count");
  if (d == 0 || n == 0) throw ParseError("dictionary: zero dimension");
  Eigen::MatrixXd cols(d, n);
  for (Eigen::Index i = 0; i < cols.size(); ++i) cols.data()[i] = get_le<double>(in, "weights");
  std::vector<int> ids(n);
  for (auto& id : ids) id = get_le<std::int32_t>(in, "class ids");
  try {
    return Dictionary(std::move(cols), std::move(ids), class_count);
  } catch (const ParameterError& e) {
    throw ParseError(std::string("dictionary: ") + e.what());
  }
}

std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string merge_map_filename(DescriptorKind kind, int target) {
  if (!is_enhanced(kind)) return "merge_u" + std::to_string(target + 1) + ".txt";
  const FrequencyPair p = frequency_pairs()[static_cast<std::size_t>(target)];
  return "merge_p" + std::to_string(p.principal + 1) + "c" + std::to_string(p.correlated + 1) + ".txt";
}

void write_bank(const ScaleBank& bank, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream m(dir / "manifest.txt");
    if (!m) throw IoError("cannot write " + (dir / "manifest.txt").string());
    m << "version=" << kArchiveVersion << '\n'
      << "descriptor=" << to_string(bank.kind) << '\n'
      << "scales=" << join_ints(bank.scales()) << '\n'
      << "lambda=" << format_double(bank.lambda) << '\n'
      << "valid_bins=" << bank.valid_bins << '\n'
      << "layout=" << kLayoutOrder << '\n'
      << "layout_version=" << kLayoutVersion << '\n'
      << "class_count=" << bank.class_count() << '\n';
    for (std::size_t i = 0; i < bank.class_names.size(); ++i) m << "class." << i << '=' << bank.class_names[i] << '\n';
  }
  for (const ScaleModel& model : bank.models) {
    const auto sdir = scale_dir(dir, model.scale);
    std::filesystem::create_directories(sdir);
    for (std::size_t t = 0; t < model.maps.size(); ++t) {
      const auto path = sdir / merge_map_filename(bank.kind, static_cast<int>(t));
      std::ofstream f(path);
      if (!f) throw IoError("cannot write " + path.string());
      write_merge_map(model.maps[t], f);
    }
    const auto path = sdir / "dictionary.bin";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    write_dictionary(model.dictionary, f);
    if (!f) throw IoError("write failed for " + path.string());
  }
}

ScaleBank read_bank(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.txt";
  std::ifstream m(manifest_path);
  if (!m) throw IoError("cannot open " + manifest_path.string());
  const auto kv = parse_key_values(m, manifest_path.string());
  if (to_int(require(kv, "version"), "version") != kArchiveVersion) throw ParseError("manifest: unsupported version");
  if (to_int(require(kv, "layout_version"), "layout_version") != kLayoutVersion ||
      require(kv, "layout") != kLayoutOrder) {
    throw ParseError("manifest: incompatible feature layout");
  }
  ScaleBank bank;
  try {
    bank.kind = parse_kind(require(kv, "descriptor"));
  } catch (const ParameterError& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  bank.lambda = std::stod(require(kv, "lambda"));
  bank.valid_bins = to_int(require(kv, "valid_bins"), "valid_bins");
  const int class_count = to_int(require(kv, "class_count"), "class_count");
  for (int i = 0; i < class_count; ++i) bank.class_names.push_back(require(kv, "class." + std::to_string(i)));

  std::vector<int> scales;
  std::stringstream ss(require(kv, "scales"));
  for (std::string tok; std::getline(ss, tok, ',');) scales.push_back(to_int(tok, "scales"));
  for (int scale : scales) {
    const auto sdir = scale_dir(dir, scale);
    std::vector<MergeMap> maps;
    for (int t = 0; t < target_count(bank.kind); ++t) {
      const auto path = sdir / merge_map_filename(bank.kind, t);
      std::ifstream f(path);
      if (!f) throw IoError("cannot open " + path.string());
      try {
        maps.push_back(read_merge_map(f));
      } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
      }
    }
    const auto path = sdir / "dictionary.bin";
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    bank.models.emplace_back(scale, std::move(maps), read_dictionary(f, class_count), bank.lambda);
  }
  return bank;
}

}  // namespace elfd
