// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Bundled frequency lexicon for the rules tagger. One entry per line:
// word, then its Penn tags most-frequent first. Lookups are exact first,
// then lowercase. Bump kLexiconVersion whenever an entry changes, since the
// tag stream (and therefore every trained vocabulary) depends on it.

#include "lexicon.hpp"

namespace reqrnn::detail {

const std::string_view kLexiconVersion = "ptb-rules-1.0";

const std::string_view kLexiconData = R"LEX(
a DT
an DT
the DT
this DT
that IN DT WDT
these DT
those DT
each DT
every DT
all DT PDT
any DT
some DT
no DT
another DT
either DT CC
neither DT CC
both DT CC
half PDT NN
such JJ PDT
and CC
or CC
but CC
nor CC
plus CC
versus IN
of IN
in IN RP
on IN RP
at IN
by IN
for IN
from IN
with IN
within IN
without IN
into IN
onto IN
upon IN
about IN RB
above IN
below IN
under IN
over IN RP
after IN
before IN
during IN
until IN
unless IN
since IN
because IN
if IN
whether IN
while IN
than IN
as IN
per IN
via IN
through IN
throughout IN
between IN
among IN
against IN
across IN
along IN
around IN RB
behind IN
beyond IN
toward IN
towards IN
except IN
including VBG
regarding VBG
following VBG JJ
like IN VB
whereas IN
although IN
though IN
so RB IN
to TO
not RB
n't RB
never RB
always RB
also RB
only RB JJ
already RB
still RB
just RB
very RB
too RB
again RB
then RB
now RB
here RB
there EX RB
however RB
automatically RB
immediately RB
periodically RB
quickly RB
securely RB
manually RB
successfully RB
correctly RB
approximately RB
possibly RB
perhaps RB
probably RB
maybe RB
likely JJ RB
usually RB
often RB
sometimes RB
daily JJ RB
nightly JJ RB
weekly JJ RB
monthly JJ RB
once RB IN
twice RB
shall MD
will MD
should MD
must MD
may MD
might MD
can MD
could MD
would MD
ca MD
wo MD
'll MD
'd MD
i PRP
I PRP
you PRP
he PRP
she PRP
it PRP
we PRP
they PRP
me PRP
him PRP
her PRP$ PRP
us PRP
them PRP
itself PRP
themselves PRP
my PRP$
your PRP$
his PRP$
its PRP$
our PRP$
their PRP$
who WP
whom WP
whose WP$
what WP WDT
which WDT
where WRB
when WRB
how WRB
why WRB
be VB
is VBZ
are VBP
am VBP
was VBD
were VBD
been VBN
being VBG
has VBZ
have VBP VB
had VBD VBN
do VBP VB
does VBZ
did VBD
done VBN
's VBZ POS
're VBP
've VBP
'm VBP
able JJ
available JJ
valid JJ
invalid JJ
new JJ
main JJ
current JJ
previous JJ
next JJ
last JJ
first JJ
second JJ NN
other JJ
same JJ
different JJ
specific JJ
several JJ
many JJ
few JJ
more JJR RBR
most JJS RBS
less JJR RBR
least JJS RBS
better JJR
best JJS
fast JJ RB
slow JJ
high JJ
low JJ
large JJ
small JJ
secure JJ VB
public JJ
private JJ
external JJ
internal JJ
pending JJ VBG
authorized JJ VBN
unauthorized JJ
appropriate JJ
complete JJ VB
correct JJ VB
singular JJ
clear JJ VB
easy JJ
user NN
users NNS
system NN
systems NNS
application NN
server NN
portal NN
module NN
controller NN
scheduler NN
gateway NN
client NN
service NN
data NNS NN
database NN
report NN VB
reports NNS VBZ
transaction NN
transactions NNS
error NN
errors NNS
request NN VB
requests NNS VBZ
record NN VB
records NNS VBZ
result NN
results NNS
configuration NN
account NN
accounts NNS
schedule NN VB
payment NN
details NNS
detail NN
event NN
log NN VB
message NN
messages NNS
order NN VB
orders NNS
invoice NN
invoices NNS
customer NN
customers NNS
administrator NN
administrators NNS
admin NN
admins NNS
operator NN
session NN
sessions NNS
update VB NN
end NN VB
day NN
days NNS
screen NN
batch NN
audit NN
trail NN
time NN
password NN
passwords NNS
file NN
files NNS
interface NN
information NN
access NN VB
response NN
performance NN
security NN
network NN
email NN VB
mail NN
input NN
output NN
format NN
field NN
fields NNS
page NN
pages NNS
button NN
list NN VB
number NN
name NN
type NN
level NN
process VB NN
support VB NN
use VB NN
set VB NN VBN
store VB NN
display VB NN
validate VB
export VB NN
encrypt VB
send VB
delete VB
generate VB
archive VB NN
print VB NN
verify VB
track VB NN
provide VB
allow VB
enable VB
ensure VB
include VB
contain VB
create VB
notify VB
respond VB
show VB NN
handle VB NN
check VB NN
manage VB
maintain VB
receive VB
return VB NN
save VB
load VB NN
run VB NN
stop VB NN
start VB NN
test VB NN
go VB
make VB
get VB
take VB
give VB
see VB
wait VB
expires VBZ
occurs VBZ
exists VBZ
fails VBZ
using VBG
based VBN
seconds NNS
minutes NNS
hours NNS
percent NN
one CD
two CD
three CD
four CD
five CD
six CD
seven CD
eight CD
nine CD
ten CD
hundred CD
thousand CD
etc FW
etc. FW
e.g. FW
i.e. FW
yes UH
please UH
)LEX";

}  // namespace reqrnn::detail
