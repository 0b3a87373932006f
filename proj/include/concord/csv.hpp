#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "concord/rating_matrix.hpp"

namespace concord {

struct CsvOptions {
  /// Tokens read as a missing entry, compared after trimming whitespace.
  std::vector<std::string> missing_tokens{"", "NA", "NaN", "null"};
  bool integer_mode = true;
};

struct LoadResult {
  RatingMatrix matrix;
  /// Fully-missing rows are removed on load so assumption 1 holds.
  Index dropped_rows = 0;
  std::vector<std::string> dropped_labels;
};

/// Layout: header row names the id column and the providers; each data row is
/// a subject id followed by one rating per provider. Quoted fields follow the
/// usual CSV conventions.
LoadResult load_csv(const std::string& path, const CsvOptions& opts = {});
LoadResult read_csv(std::istream& in, const CsvOptions& opts = {});

void save_csv(const RatingMatrix& M, const std::string& path);
void write_csv(const RatingMatrix& M, std::ostream& out);

}  // namespace concord
