#pragma once

#include "crc/algebra.hpp"
#include "crc/cartan_verify.hpp"
#include "crc/circles.hpp"
#include "crc/cr_frame.hpp"
#include "crc/io.hpp"
#include "crc/maps.hpp"
#include "crc/sampling.hpp"
