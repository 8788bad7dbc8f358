# Every trace starts with {} and is arbitrary afterwards.
aps: a
vertex s {} initial
vertex n {}
vertex y {a}
edge s n
edge s y
edge n n
edge n y
edge y n
edge y y
