// Writes the bundled synthetic datasets: three labeled 2-D shape sets and a
// housing-style regression set with its train/test split.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bfc/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate the synthetic benchmark datasets"};
  std::string out_dir = "data";
  app.add_option("--out", out_dir, "output directory (default: data)");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    bfc::write_xy_label(out_dir + "/r15_synth.txt", bfc::make_r15_like());
    bfc::write_xy_label(out_dir + "/aggregation_synth.txt",
                        bfc::make_aggregation_like());
    bfc::write_xy_label(out_dir + "/compound_synth.txt", bfc::make_compound_like());

    const bfc::DataMatrix housing = bfc::make_cadata_like();
    constexpr std::size_t kTrain = 18432;
    bfc::DataMatrix train(0, 0), test(0, 0);
    for (std::size_t i = 0; i < housing.rows(); ++i) {
      bfc::DataMatrix& dst = i < kTrain ? train : test;
      dst.append_row(housing.row(i));
      dst.targets().push_back(housing.targets()[i]);
    }
    bfc::write_csv(out_dir + "/housing_train.csv", train);
    bfc::write_csv(out_dir + "/housing_test.csv", test);
    std::printf("wrote 5 files under %s\n", out_dir.c_str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
