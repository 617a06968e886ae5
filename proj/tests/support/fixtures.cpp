#include "fixtures.hpp"

#include <filesystem>
#include <random>

#include "blockdbg/core/program_io.hpp"

#ifndef BLOCKDBG_SOURCE_DIR
#error "BLOCKDBG_SOURCE_DIR must be defined"
#endif

namespace blockdbg::testing {

std::string corpus_path(const std::string& relative) {
  return std::string(BLOCKDBG_SOURCE_DIR) + "/corpus/" + relative;
}

Program load_corpus_program(const std::string& name) {
  return load_program_file(corpus_path("programs/" + name + ".blk.json"));
}

std::shared_ptr<const Program> corpus_program_ptr(const std::string& name) {
  return std::make_shared<const Program>(load_corpus_program(name));
}

const std::vector<std::string>& corpus_program_names() {
  static const std::vector<std::string> names = {"sum_list",    "index_bug",       "off_by_one",
                                                 "wrong_branch", "forever_hi",     "two_scripts",
                                                 "greet_procedure"};
  return names;
}

TempDir::TempDir() {
  namespace fs = std::filesystem;
  std::random_device rd;
  for (;;) {
    fs::path p = fs::temp_directory_path() / ("blockdbg-test-" + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p.string();
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace blockdbg::testing
