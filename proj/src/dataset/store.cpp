#include "itrc/dataset/store.hpp"

#include "itrc/io/codec.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <unordered_set>

namespace itrc::data {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view label_name(Label l) {
  return l == Label::Similar ? "Similar" : "Complementary";
}

Label parse_label(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "similar") return Label::Similar;
  if (lower == "complementary") return Label::Complementary;
  if (lower == "unrelated")
    throw StoreError(StoreErrorCode::Label,
                     "label 'Unrelated' is excluded; only Similar and Complementary are supported");
  throw StoreError(StoreErrorCode::Label, "unknown label '" + std::string(s) + "'");
}

std::vector<int> EmbeddingStore::label_indices() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(static_cast<int>(r.label));
  return out;
}

std::string_view error_code_name(StoreErrorCode c) {
  switch (c) {
    case StoreErrorCode::Io: return "io error";
    case StoreErrorCode::Format: return "format error";
    case StoreErrorCode::Dimension: return "dimension error";
    case StoreErrorCode::Count: return "count mismatch";
    case StoreErrorCode::Checksum: return "checksum failure";
    case StoreErrorCode::NonFinite: return "non-finite value";
    case StoreErrorCode::Label: return "label error";
    case StoreErrorCode::DuplicateId: return "duplicate pair id";
  }
  return "error";
}

void validate(const EmbeddingStore& store) {
  const auto n = static_cast<Eigen::Index>(store.size());
  const auto d = static_cast<Eigen::Index>(store.dim);
  if (store.dim == 0) throw StoreError(StoreErrorCode::Dimension, "dim must be positive");
  for (const auto* m : {&store.text, &store.image}) {
    if (m->cols() != d)
      throw StoreError(StoreErrorCode::Dimension, "matrix width " + std::to_string(m->cols()) +
                                                      " != declared dim " + std::to_string(d));
    if (m->rows() != n)
      throw StoreError(StoreErrorCode::Count, "matrix has " + std::to_string(m->rows()) +
                                                  " rows for " + std::to_string(n) + " records");
    if (!m->allFinite()) throw StoreError(StoreErrorCode::NonFinite, "embedding contains NaN or Inf");
  }
  std::unordered_set<std::string> seen;
  for (const auto& r : store.records) {
    if (!seen.insert(r.pair_id).second)
      throw StoreError(StoreErrorCode::DuplicateId, "pair_id '" + r.pair_id + "' repeats");
  }
}

namespace {

num::Matrix read_blob(const fs::path& path, std::size_t n, std::size_t dim,
                      const std::string& expected_sha, std::string_view name) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = io::read_file(path.string());
  } catch (const std::exception& e) {
    throw StoreError(StoreErrorCode::Io, e.what());
  }
  const std::size_t size = bytes.size();
  if (n > 0 && size % (4 * n) == 0 && size / (4 * n) != dim)
    throw StoreError(StoreErrorCode::Dimension,
                     std::string(name) + " rows hold " + std::to_string(size / (4 * n)) +
                         " floats, manifest declares dim " + std::to_string(dim));
  if (size != 4 * n * dim)
    throw StoreError(StoreErrorCode::Count, std::string(name) + " has " + std::to_string(size) +
                                                " bytes, expected " + std::to_string(4 * n * dim) +
                                                " for n=" + std::to_string(n));
  if (io::sha256_hex(bytes) != expected_sha)
    throw StoreError(StoreErrorCode::Checksum, std::string(name) + " sha256 does not match manifest");
  const std::vector<double> values = io::unpack_f32le(bytes);
  num::Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::copy(values.begin(), values.end(), m.data());
  if (!m.allFinite())
    throw StoreError(StoreErrorCode::NonFinite, std::string(name) + " contains NaN or Inf");
  return m;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw StoreError(StoreErrorCode::Format, std::string("manifest lacks '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw StoreError(StoreErrorCode::Format, std::string("manifest field '") + key + "': " + e.what());
  }
}

}  // namespace

EmbeddingStore load_store(const std::string& dir) {
  const fs::path root(dir);
  json manifest;
  try {
    const auto bytes = io::read_file((root / kManifestFile).string());
    manifest = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw StoreError(StoreErrorCode::Format, std::string("manifest is not valid JSON: ") + e.what());
  } catch (const std::exception& e) {
    throw StoreError(StoreErrorCode::Io, e.what());
  }
  if (!manifest.is_object()) throw StoreError(StoreErrorCode::Format, "manifest must be a JSON object");
  if (field<std::string>(manifest, "format") != kStoreFormat)
    throw StoreError(StoreErrorCode::Format, "format is not '" + std::string(kStoreFormat) + "'");
  if (field<int>(manifest, "version") != kStoreVersion)
    throw StoreError(StoreErrorCode::Format, "unsupported version " +
                                                 std::to_string(field<int>(manifest, "version")));

  const auto n = field<std::size_t>(manifest, "n");
  const auto dim = field<std::size_t>(manifest, "dim");
  if (dim == 0) throw StoreError(StoreErrorCode::Dimension, "dim must be positive");
  const auto records = field<json>(manifest, "records");
  if (!records.is_array() || records.size() != n)
    throw StoreError(StoreErrorCode::Count, "manifest lists " + std::to_string(records.size()) +
                                                " records, n=" + std::to_string(n));

  EmbeddingStore store;
  store.dim = dim;
  store.records.reserve(n);
  for (const auto& r : records) {
    PairRecord rec;
    rec.pair_id = field<std::string>(r, "pair_id");
    try {
      rec.label = parse_label(field<std::string>(r, "label"));
    } catch (const StoreError& e) {
      throw StoreError(StoreErrorCode::Label, "pair '" + rec.pair_id + "': " + e.what());
    }
    if (r.contains("text") && r["text"].is_string()) rec.text = r["text"].get<std::string>();
    if (r.contains("image_path") && r["image_path"].is_string())
      rec.image_path = r["image_path"].get<std::string>();
    store.records.push_back(std::move(rec));
  }
  store.text = read_blob(root / kTextBlob, n, dim, field<std::string>(manifest, "text_sha256"), kTextBlob);
  store.image =
      read_blob(root / kImageBlob, n, dim, field<std::string>(manifest, "image_sha256"), kImageBlob);
  validate(store);
  return store;
}

void save_store(const EmbeddingStore& store, const std::string& dir) {
  validate(store);
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw StoreError(StoreErrorCode::Io, "cannot create '" + dir + "': " + ec.message());

  const auto text = io::pack_f32le(std::span(store.text.data(), store.text.size()));
  const auto image = io::pack_f32le(std::span(store.image.data(), store.image.size()));

  json records = json::array();
  for (const auto& r : store.records) {
    json j{{"pair_id", r.pair_id}, {"label", label_name(r.label)}};
    if (r.text) j["text"] = *r.text;
    if (r.image_path) j["image_path"] = *r.image_path;
    records.push_back(std::move(j));
  }
  json manifest{{"format", kStoreFormat},
                {"version", kStoreVersion},
                {"n", store.size()},
                {"dim", store.dim},
                {"records", std::move(records)},
                {"text_sha256", io::sha256_hex(text)},
                {"image_sha256", io::sha256_hex(image)}};
  try {
    io::write_file((root / kTextBlob).string(), text);
    io::write_file((root / kImageBlob).string(), image);
    io::write_text((root / kManifestFile).string(), manifest.dump(1) + "\n");
  } catch (const std::exception& e) {
    throw StoreError(StoreErrorCode::Io, e.what());
  }
}

}  // namespace itrc::data
