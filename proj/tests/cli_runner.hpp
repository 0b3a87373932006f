#pragma once

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

// Drives the installed command line binary as a subprocess and captures its
// exit code and streams. CONCORD_CLI_PATH is injected by the build.

namespace cli {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   (tag + "-" + std::to_string(rd()) + "-" +
                    std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

inline RunResult run(const std::string& args, const std::filesystem::path& dir) {
  const auto out_path = dir / "stdout.txt";
  const auto err_path = dir / "stderr.txt";
  const std::string cmd = std::string(CONCORD_CLI_PATH) + " " + args + " > " +
                          out_path.string() + " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

}  // namespace cli
