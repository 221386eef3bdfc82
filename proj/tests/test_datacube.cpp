// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "fcd/cube_io.hpp"
#include "test_util.hpp"

using namespace fcd;
using testutil::TempDir;

TEST_SUITE("datacube") {

TEST_CASE("cube write/read round-trip is bit-identical, NaN included") {
    TempDir dir("cube_rt");
    DataCube cube = testutil::random_cube(9, 7, 5, 2, 42, -11.0, 2.0, 0.15);
    cube.at(3, 0, 2, 2) = std::numeric_limits<float>::quiet_NaN();
    cube.at(3, 1, 2, 2) = std::numeric_limits<float>::quiet_NaN();

    write_cube(cube, dir.str());
    const DataCube back = read_cube((dir.path() / "cube.json").string());
    CHECK(back.width == cube.width);
    CHECK(back.height == cube.height);
    CHECK(back.variables == cube.variables);
    CHECK(back.dates == cube.dates);
    REQUIRE(back.values.size() == cube.values.size());
    CHECK(std::memcmp(back.values.data(), cube.values.data(),
                      cube.values.size() * sizeof(float)) == 0);
}

TEST_CASE("1x1x1x1 singleton cube") {
    TempDir dir("cube_singleton");
    DataCube cube = testutil::make_cube(1, 1, 1, 1, -7.5f);
    write_cube(cube, dir.str());
    const DataCube back = read_cube((dir.path() / "cube.json").string());
    CHECK(back.values.size() == 1);
    CHECK(back.values[0] == -7.5f);
}

TEST_CASE("manifest dims must match payload length") {
    TempDir dir("cube_mismatch");
    DataCube cube = testutil::make_cube(4, 4, 3, 1, 1.0f);
    write_cube(cube, dir.str());
    // Manifest claims 2 timesteps but the payload holds 3.
    std::ifstream in((dir.path() / "cube.json").string());
    nlohmann::json j;
    in >> j;
    in.close();
    j["n_time"] = 2;
    j["dates"] = {"2017-01-05", "2017-01-17"};
    std::ofstream out((dir.path() / "cube.json").string(), std::ios::trunc);
    out << j.dump();
    out.close();
    CHECK_THROWS_WITH_AS(read_cube((dir.path() / "cube.json").string()),
                         doctest::Contains("payload"), validation_error);
}

TEST_CASE("non-increasing dates are rejected") {
    DataCube cube = testutil::make_cube(2, 2, 3, 1);
    cube.dates[2] = cube.dates[1];
    CHECK_THROWS_WITH_AS(cube.validate(), doctest::Contains("dates"), validation_error);
}

TEST_CASE("mixed per-variable NaN at one pixel is rejected at load") {
    TempDir dir("cube_mixed_nan");
    DataCube cube = testutil::make_cube(3, 3, 2, 2, 0.5f);
    cube.at(1, 0, 1, 1) = std::numeric_limits<float>::quiet_NaN();
    // variable 1 stays observed -> invalid
    CHECK_THROWS_WITH_AS(cube.validate(), doctest::Contains("mixed"), validation_error);

    // And write_cube refuses it before writing anything.
    CHECK_THROWS_AS(write_cube(cube, dir.str()), validation_error);
}

TEST_CASE("empty variable list is rejected before write") {
    TempDir dir("cube_novars");
    DataCube cube = testutil::make_cube(2, 2, 2, 1);
    cube.variables.clear();
    CHECK_THROWS_WITH_AS(write_cube(cube, dir.str()), doctest::Contains("variables"),
                         validation_error);
}

TEST_CASE("missing manifest raises io_error") {
    CHECK_THROWS_AS(read_cube("/nonexistent/cube.json"), io_error);
}

TEST_CASE("mask round-trip and validation") {
    TempDir dir("mask_rt");
    ForestMask mask = testutil::full_mask(4, 4);
    CHECK(mask.count() == 16);

    SplitMix64 rng(99);
    for (auto& f : mask.flags) f = rng.u01() < 0.5 ? 1 : 0;
    const std::string path = (dir.path() / "mask.json").string();
    write_mask(mask, path);
    const ForestMask back = read_mask(path);
    CHECK(back.flags == mask.flags);

    // A byte outside {0,1} in the payload is rejected.
    std::ofstream bin((dir.path() / "mask.bin").string(), std::ios::binary | std::ios::trunc);
    std::vector<char> bytes(16, 0);
    bytes[5] = 2;
    bin.write(bytes.data(), bytes.size());
    bin.close();
    CHECK_THROWS_WITH_AS(read_mask(path), doctest::Contains("not 0 or 1"), validation_error);
}

TEST_CASE("change map: files, CSV, and raster round-trip") {
    TempDir dir("cmap_rt");
    const auto dates = testutil::make_dates(10);

    ChangeMap map;
    map.width = 6;
    map.height = 5;
    map.change_index.assign(30, kNoChange);
    map.final_evidence.assign(30, std::numeric_limits<float>::quiet_NaN());
    map.low_coverage.assign(30, 0);

    SUBCASE("no changes: empty CSV body, all-white PNG") {
        write_change_map(map, dates, dir.str());
        std::ifstream csv((dir.path() / "changes.csv").string());
        std::string header, rest;
        std::getline(csv, header);
        CHECK(header == "x,y,change_index,change_date,final_evidence,low_coverage");
        CHECK(!std::getline(csv, rest)); // no data rows
        CHECK(std::filesystem::exists(dir.path() / "changes.png"));
    }

    SUBCASE("single change carries its date into the CSV") {
        map.change_index[2 * 6 + 3] = 5;
        map.final_evidence[2 * 6 + 3] = 12.5f;
        write_change_map(map, dates, dir.str());
        std::ifstream csv((dir.path() / "changes.csv").string());
        std::string header, row;
        std::getline(csv, header);
        REQUIRE(std::getline(csv, row));
        CHECK(row == "3,2,5," + format_date(dates[5]) + ",12.5,0");
    }

    SUBCASE("raster round-trip preserves the change_index grid exactly") {
        SplitMix64 rng(5);
        for (auto& c : map.change_index)
            c = rng.u01() < 0.3 ? static_cast<int32_t>(rng.bounded(10)) : kNoChange;
        map.low_coverage[7] = 1;
        map.change_index[7] = kNoChange;
        write_change_map(map, dates, dir.str());
        std::vector<Date> dates_back;
        const ChangeMap back =
            read_change_map((dir.path() / "changes.json").string(), &dates_back);
        CHECK(back.change_index == map.change_index);
        CHECK(back.low_coverage == map.low_coverage);
        CHECK(dates_back == dates);
    }
}

TEST_CASE("reference map round-trip") {
    TempDir dir("ref_rt");
    ReferenceChangeMap ref;
    ref.width = 4;
    ref.height = 3;
    ref.change_index.assign(12, kNoChange);
    ref.change_index[5] = 2;
    ref.dates = testutil::make_dates(4);
    ref.provenance = "synthetic-truth";
    const std::string path = (dir.path() / "ref.json").string();
    write_reference_map(ref, path);
    const ReferenceChangeMap back = read_reference_map(path);
    CHECK(back.change_index == ref.change_index);
    CHECK(back.dates == ref.dates);
    CHECK(back.provenance == ref.provenance);
}

TEST_CASE("change_index outside the valid range is rejected") {
    ChangeMap map;
    map.width = 2;
    map.height = 1;
    map.change_index = {5, -1};
    map.final_evidence.assign(2, 0.0f);
    map.low_coverage.assign(2, 0);
    CHECK_THROWS_AS(map.validate(3), validation_error); // 5 >= n_time
    map.change_index = {-2, 0};
    CHECK_THROWS_AS(map.validate(3), validation_error);
}

} // TEST_SUITE
