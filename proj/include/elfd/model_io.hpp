#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "elfd/recognition.hpp"

namespace elfd {

inline constexpr int kArchiveVersion = 1;
inline constexpr char kDictionaryMagic[8] = {'E', 'L', 'F', 'D', 'D', 'I', 'C', '1'};

/// Binary dictionary: 8-byte magic, u32 d, u32 N, d*N f64 column-major, N i32 class ids; all little-endian.
void write_dictionary(const Dictionary& dict, std::ostream& out);
/// `class_count` comes from the manifest.
Dictionary read_dictionary(std::istream& in, int class_count);

/// Ordered key=value lines; '#' starts a comment line.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin);

/// Archive layout:
///   manifest.txt
///   scale_<W>/dictionary.bin
///   scale_<W>/merge_<target>.txt   (plane index or "p<P>c<C>" pair, 1-based)
void write_bank(const ScaleBank& bank, const std::filesystem::path& dir);
ScaleBank read_bank(const std::filesystem::path& dir);

/// Merge-map file name for one target of a descriptor kind.
std::string merge_map_filename(DescriptorKind kind, int target);

}  // namespace elfd
