"""Independent brute-force check by rotation-system enumeration"""
