#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tomo/error.hpp"
#include "tomo/grid_io.hpp"

using namespace tomo;

TEST_CASE("grid round trip through float32 and a sidecar") {
    Grid2D g(5, 3, 0.25, 0.5, {-1.0, 2.0});
    for (std::size_t k = 0; k < g.values.size(); ++k) g.values[k] = 0.1 * k - 0.7;
    const auto path = std::filesystem::temp_directory_path() / "tomo_test_grid.bin";
    save_grid(g, path);
    CHECK(std::filesystem::file_size(path) == 15 * 4);
    const Grid2D back = load_grid(path);
    CHECK(back.nx == 5);
    CHECK(back.ny == 3);
    CHECK(back.dx == 0.25);
    CHECK(back.origin.y == 2.0);
    for (std::size_t k = 0; k < g.values.size(); ++k)
        CHECK(back.values[k] == static_cast<double>(static_cast<float>(g.values[k])));

    std::filesystem::resize_file(path, 20);
    CHECK_THROWS_AS(load_grid(path), IoError);
    std::filesystem::remove(sidecar_path(path));
    CHECK_THROWS_AS(load_grid(path), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("PGM quick look") {
    Grid2D g(4, 2, 1.0, 1.0, {});
    g.values = {0, 1, 2, 3, 4, 5, 6, 7};
    const auto path = std::filesystem::temp_directory_path() / "tomo_test.pgm";
    save_pgm(g, path);
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    std::size_t w = 0, h = 0, maxv = 0;
    in >> magic >> w >> h >> maxv;
    in.get();
    CHECK(magic == "P5");
    CHECK(w == 4);
    CHECK(h == 2);
    CHECK(maxv == 255);
    unsigned char px[8];
    in.read(reinterpret_cast<char*>(px), 8);
    CHECK(px[0] == 146);  // top row is j = 1: value 4 of 0..7
    CHECK(px[7] == 109);  // bottom row ends with value 3
    std::filesystem::remove(path);
}
