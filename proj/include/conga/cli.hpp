#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conga/corpus.hpp"

namespace conga::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailed = 1;  // also: translate with failed lines
inline constexpr int kUsageOrIo = 2;

struct RunConfig {
  std::string subcommand;
  std::filesystem::path input;
  std::optional<CorpusFormat> format;
  std::vector<std::string> systems;
  std::filesystem::path out_dir = ".";
  bool write_json = true;
  bool write_table = true;
  bool strict = false;
  bool force = false;
  unsigned workers = 1;
};

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conga::cli
