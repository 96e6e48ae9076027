# CODATA 2018
C0 = 2.99792458e8  # m/s
EPS0 = 8.8541878128e-12  # F/m
MU0 = 1.25663706212e-6  # H/m

# standard WR5 inner dimensions
WR5_A = 1.2954e-3  # m
WR5_B = 0.6477e-3  # m
