// Regenerates the committed toy treebank under data/toy/. The splits use
// fixed seeds so the files are reproducible.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "dctree/toygen.hpp"

int main(int argc, char** argv) {
  CLI::App app{"write the toy negation treebank"};
  std::string out_dir = "data/toy";
  app.add_option("--out", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);

  const auto write_split = [&out_dir](const char* name, int samples,
                                      uint64_t seed) {
    dctree::ToyOptions opt;
    opt.samples = samples;
    opt.seed = seed;
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path);
    for (const std::string& line : dctree::make_toy_lines(opt)) {
      out << line << '\n';
    }
    std::printf("%s: %d samples\n", path.c_str(), samples);
  };

  write_split("train.txt", 200, 7);
  write_split("dev.txt", 50, 8);
  write_split("test.txt", 100, 9);
  return 0;
}
