// generated by tests/oracles/gen_jet_oracles.py; do not edit
#include <cmath>

namespace dfindex::generated {

// value, 4 first, 10 second, 20 third derivatives (sorted index tuples)
void worm_core_jet(const double* x, double* out) {
  const double x1 = x[0], y1 = x[1], x2 = x[2], y2 = x[3];
  (void)x1; (void)y1; (void)x2; (void)y2;
  const double t0 = pow(x2, 2);
  const double t1 = pow(y2, 2);
  const double t2 = t0 + t1;
  const double t3 = log(t2);
  const double t4 = cos(t3);
  const double t5 = sin(t3);
  const double t6 = 2*x1;
  const double t7 = 2*t4;
  const double t8 = 2*y1;
  const double t9 = 2*t5;
  const double t10 = t5*x1;
  const double t11 = 4/t2;
  const double t12 = t11*(-t10 + t4*y1);
  const double t13 = t11*t5;
  const double t14 = t11*t4;
  const double t15 = t4*y1;
  const double t16 = t0*t15;
  const double t17 = t0*t10;
  const double t18 = t0*t4;
  const double t19 = t0*t5;
  const double t20 = t1*t10;
  const double t21 = t1*t15;
  const double t22 = t20 - t21;
  const double t23 = pow(x2, 4);
  const double t24 = pow(y2, 4);
  const double t25 = 1.0/(2*t0*t1 + t23 + t24);
  const double t26 = 4*t25;
  const double t27 = t3 + M_PI_4;
  const double t28 = cos(t27);
  const double t29 = t28*x1;
  const double t30 = sin(t27);
  const double t31 = t30*y1;
  const double t32 = M_SQRT2;
  const double t33 = 8*t32*x2*y2;
  const double t34 = t1*t4;
  const double t35 = t1*t5;
  const double t36 = -t16 + t17;
  const double t37 = -t20 + t21;
  const double t38 = pow(t2, -2);
  const double t39 = 4*t38;
  const double t40 = t33*t38;
  const double t41 = 3*t1;
  const double t42 = t32*t41;
  const double t43 = 3*t0;
  const double t44 = 8/(t23*t41 + t24*t43 + pow(x2, 6) + pow(y2, 6));
  const double t45 = t44*x2;
  const double t46 = t1*t32;
  const double t47 = t44*y2;
  const double t48 = t0*t32;
  const double t49 = t32*t43;
  out[0] = pow(t4 + x1, 2) + pow(t5 + y1, 2) - 1;
  out[1] = t6 + t7;
  out[2] = t8 + t9;
  out[3] = t12*x2;
  out[4] = t12*y2;
  out[5] = 2;
  out[6] = 0;
  out[7] = -t13*x2;
  out[8] = -t13*y2;
  out[9] = 2;
  out[10] = t14*x2;
  out[11] = t14*y2;
  out[12] = t26*(-t16 + t17 - t18*t6 - t19*t8 - t22);
  out[13] = -t25*t33*(t29 + t31);
  out[14] = t26*(-t34*t6 - t35*t8 - t36 - t37);
  out[15] = 0;
  out[16] = 0;
  out[17] = 0;
  out[18] = 0;
  out[19] = 0;
  out[20] = 0;
  out[21] = 0;
  out[22] = t39*(-t0*t7 + t19 - t35);
  out[23] = -t28*t40;
  out[24] = t39*(-t1*t7 - t19 + t35);
  out[25] = 0;
  out[26] = 0;
  out[27] = 0;
  out[28] = t39*(-t0*t9 - t18 + t34);
  out[29] = -t30*t40;
  out[30] = t39*(-t1*t9 + t18 - t34);
  out[31] = t45*(3*t18*x1 + 3*t19*y1 - t29*t42 - t31*t42 + t36);
  out[32] = t47*(5*t0*t4*x1 + 5*t0*t5*y1 - t29*t46 - t31*t46 - t36);
  out[33] = t45*(5*t1*t4*x1 + 5*t1*t5*y1 - t22 - t29*t48 - t31*t48);
  out[34] = t47*(3*t1*t4*x1 + 3*t1*t5*y1 - t29*t49 - t31*t49 - t37);
}

void worm_log_modulus_jet(const double* x, double* out) {
  const double x1 = x[0], y1 = x[1], x2 = x[2], y2 = x[3];
  (void)x1; (void)y1; (void)x2; (void)y2;
  const double t0 = pow(x2, 2);
  const double t1 = pow(y2, 2);
  const double t2 = t0 + t1;
  const double t3 = 2/t2;
  const double t4 = -t1;
  const double t5 = t0 + t4;
  const double t6 = pow(t2, -2);
  const double t7 = 2*t6;
  const double t8 = 4*x2;
  const double t9 = t0 - 3*t1;
  const double t10 = pow(t2, -3);
  const double t11 = t10*t8;
  const double t12 = 3*t0 + t4;
  const double t13 = 4*t10*y2;
  out[0] = log(t2);
  out[1] = 0;
  out[2] = 0;
  out[3] = t3*x2;
  out[4] = t3*y2;
  out[5] = 0;
  out[6] = 0;
  out[7] = 0;
  out[8] = 0;
  out[9] = 0;
  out[10] = 0;
  out[11] = 0;
  out[12] = -t5*t7;
  out[13] = -t6*t8*y2;
  out[14] = t5*t7;
  out[15] = 0;
  out[16] = 0;
  out[17] = 0;
  out[18] = 0;
  out[19] = 0;
  out[20] = 0;
  out[21] = 0;
  out[22] = 0;
  out[23] = 0;
  out[24] = 0;
  out[25] = 0;
  out[26] = 0;
  out[27] = 0;
  out[28] = 0;
  out[29] = 0;
  out[30] = 0;
  out[31] = t11*t9;
  out[32] = t12*t13;
  out[33] = -t11*t9;
  out[34] = -t12*t13;
}

}  // namespace dfindex::generated
