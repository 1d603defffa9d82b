#pragma once

#include "itrc/numerics/tensor.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace itrc::data {

/// Relationship classes; the value is the class index used by every model.
enum class Label : int { Similar = 0, Complementary = 1 };
inline constexpr int kNumClasses = 2;

std::string_view label_name(Label l);
/// Accepts "Similar" / "Complementary" (case-insensitive); throws StoreError.
Label parse_label(std::string_view s);

struct PairRecord {
  std::string pair_id;
  Label label = Label::Similar;
  std::optional<std::string> text;
  std::optional<std::string> image_path;
};

/// N image-text pairs with one embedding row per modality. Values are held
/// in double; on disk they are binary32.
struct EmbeddingStore {
  std::size_t dim = 512;
  num::Matrix text;   // N x dim
  num::Matrix image;  // N x dim
  std::vector<PairRecord> records;

  std::size_t size() const { return records.size(); }
  std::vector<int> label_indices() const;
};

enum class StoreErrorCode {
  Io,
  Format,      // magic or version mismatch, malformed manifest
  Dimension,   // rows carry a width other than the declared dim
  Count,       // byte count does not match n * dim
  Checksum,
  NonFinite,
  Label,       // unknown or excluded label (e.g. "Unrelated")
  DuplicateId,
};

std::string_view error_code_name(StoreErrorCode c);

class StoreError : public std::runtime_error {
public:
  StoreError(StoreErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  StoreErrorCode code() const { return code_; }

private:
  StoreErrorCode code_;
};

inline constexpr std::string_view kStoreFormat = "iteb";
inline constexpr int kStoreVersion = 1;
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kTextBlob = "text.f32le";
inline constexpr std::string_view kImageBlob = "image.f32le";

/// Checks internal consistency (shapes, finite values, unique ids).
void validate(const EmbeddingStore& store);

/// Reads and fully validates a store directory.
EmbeddingStore load_store(const std::string& dir);

/// Writes manifest.json plus the two blobs; creates the directory.
void save_store(const EmbeddingStore& store, const std::string& dir);

}  // namespace itrc::data
