# Octahedral systems toolkit
